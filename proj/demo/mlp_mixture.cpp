// Trains the ReLU network on the mixture data with and without 300 noise
// inputs and prints the test accuracy for a few training-set sizes.

#include <cstdio>

#include "dimlab/dimlab.hpp"

using namespace dimlab;

int main() {
    harness::ExperimentConfig cfg;
    cfg.name = "mlp-mixture";
    cfg.family = datagen::Family::GaussianMixture;
    cfg.noise = datagen::NoiseSpec::GaussianIID{1.0};
    cfg.dim_grid = {{0, 0.0}, {300, 0.0}};
    cfg.ntr_grid = {10, 50, 200};
    cfg.model = harness::ModelKind::MlpReluXent;
    cfg.repetitions = 1;
    cfg.test_size = 2000;
    const auto result = harness::run_sweep(cfg, 0);
    for (const auto& c : result.cells)
        std::printf("d=%-4ld n_tr=%-4ld accuracy=%.3f %s\n", static_cast<long>(c.d), static_cast<long>(c.n_tr),
                    c.accuracy, c.status.c_str());
}
