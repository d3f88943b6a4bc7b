// Times the parallel entropy-table kernel against the serial reference on the
// same pool and reports the largest relative difference between the two.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "mvb/dataset.h"
#include "mvb/disagreement.h"

using namespace mvb;

static double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int main(int argc, char** argv) {
    int per_class = 150;
    int repeats = 3;
    if (argc > 1) per_class = std::atoi(argv[1]);
    if (argc > 2) repeats = std::atoi(argv[2]);
    if (per_class < 2 || repeats < 1) {
        std::fprintf(stderr, "usage: %s [per_class] [repeats]\n", argv[0]);
        return 2;
    }

    SyntheticConfig cfg;
    cfg.per_class_count = per_class;
    cfg.disagreement_rate = 0.3;
    cfg.rng_seed = 42;
    MultiViewDataset ds = generate_synthetic(cfg);
    std::printf("pool: %zu samples, %d views\n", ds.pool_size(), ds.V);

    double best_par = 1e300, best_ref = 1e300;
    EntropyTable par, ref;
    for (int r = 0; r < repeats; r++) {
        auto t0 = std::chrono::steady_clock::now();
        par = build_entropy_table(ds);
        best_par = std::min(best_par, seconds_since(t0));

        t0 = std::chrono::steady_clock::now();
        ref = build_entropy_table_reference(ds);
        best_ref = std::min(best_ref, seconds_since(t0));
    }

    double worst = 0.0;
    for (int i = 0; i < ds.V; i++) {
        for (int j = 0; j < ds.V; j++) {
            if (i == j) continue;
            size_t p = par.pair_index(i, j);
            for (size_t k = 0; k < par.M; k++) {
                double a = par.H[p][k], b = ref.H[p][k];
                double denom = std::max(1.0, std::fabs(b));
                worst = std::max(worst, std::fabs(a - b) / denom);
            }
        }
    }

    std::printf("parallel:  %.4f s (best of %d)\n", best_par, repeats);
    std::printf("reference: %.4f s (best of %d)\n", best_ref, repeats);
    std::printf("speedup:   %.2fx\n", best_ref / best_par);
    std::printf("max relative difference: %.3e\n", worst);
    return worst < 1e-9 ? 0 : 1;
}
