// Many Gaussian task-unrelated inputs act like ridge regularization with
// lambda = d sigma^2 on the minimal inputs.

#include <cstdio>

#include "dimlab/dimlab.hpp"

using namespace dimlab;

int main() {
    const Eigen::Index p = 30, n = 20;
    const double lambda = 1.0;
    Engine eng = make_stream(11, "demo");
    const Matrix x = gaussian_matrix(p, n, 1.0, eng);
    const Matrix y = gaussian_matrix(2, p, 1.0, eng) * x;
    const Vector x_ts = gaussian_vector(p, 1.0, eng);
    const auto ridge = solvers::tikhonov_solution(x, y, lambda);
    const Vector target = solvers::predict(ridge, x_ts);

    std::printf("%8s %10s %12s\n", "d", "sigma", "rel. gap");
    for (Eigen::Index d : {10, 100, 1000, 10000, 50000}) {
        const double sigma = std::sqrt(lambda / static_cast<double>(d));
        Engine ne = make_stream(derive_seed(11, "noise", static_cast<std::uint64_t>(d)), "n");
        const Matrix noise = gaussian_matrix(d, n, sigma, ne);
        const auto w = solvers::with_unrelated_solution(x, noise, y);
        Vector full(p + d);
        full << x_ts, gaussian_vector(d, sigma, ne);
        const Vector pred = solvers::predict(w, full);
        std::printf("%8ld %10.4g %12.4e\n", static_cast<long>(d), sigma, (pred - target).norm() / pred.norm());
    }
}
