// Repeating the minimal dimensions k times does not change what the
// min-norm solution predicts.

#include <cstdio>

#include "dimlab/dimlab.hpp"

using namespace dimlab;

int main() {
    const Eigen::Index p = 10, n = 6;
    Engine eng = make_stream(7, "demo");
    const Matrix x = gaussian_matrix(p, n, 1.0, eng);
    const Matrix y = gaussian_matrix(2, n, 1.0, eng);
    const Vector x_ts = gaussian_vector(p, 1.0, eng);

    const auto base = solvers::min_norm_pseudo_inverse(x, y);
    const Vector ref = solvers::predict(base, x_ts);
    std::printf("k  tight-factor  max |delta prediction|\n");
    for (int k : {1, 2, 5, 10}) {
        const auto frame = solvers::FrameSpec::repeat(p, k);
        const auto w = solvers::frame_solution(x, y, frame);
        const Vector pred = solvers::predict(w, Vector(frame.materialize() * x_ts));
        std::printf("%-2d %-13g %.3e\n", k, frame.tight_factor().value_or(0.0), (pred - ref).cwiseAbs().maxCoeff());
    }

    // A Gaussian combination is not a tight frame, and the prediction moves.
    const auto g = solvers::FrameSpec::gaussian(p, 20, 3);
    const auto wg = solvers::frame_solution(x, y, g);
    const Vector pg = solvers::predict(wg, Vector(g.materialize() * x_ts));
    std::printf("gaussian d=20: max |delta prediction| = %.3e\n", (pg - ref).cwiseAbs().maxCoeff());
}
