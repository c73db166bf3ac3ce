// Times every parallel kernel against its serial reference and checks that
// the outputs are bit-identical.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include "hilbertcloud/cloud.hpp"
#include "hilbertcloud/kernels.hpp"
#include "hilbertcloud/rng.hpp"

using namespace hcl;

namespace {

double time_best_ms(int reps, const std::function<void()>& fn) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
}

PointCloud random_cloud(Rng& rng, std::size_t n, int d, double lo, double hi) {
    PointCloud pc(d);
    pc.data.reserve(n * d);
    for (std::size_t i = 0; i < n * static_cast<std::size_t>(d); ++i)
        pc.data.push_back(uniform_range(rng, lo, hi));
    return pc;
}

struct Row {
    std::string name;
    std::string size;
    double serial_ms = 0, parallel_ms = 0;
    bool identical = false;
};

void print_rows(const std::vector<Row>& rows) {
    std::printf("%-26s %-14s %12s %12s %9s %6s\n", "kernel", "size", "serial ms",
                "parallel ms", "speedup", "equal");
    for (const auto& r : rows)
        std::printf("%-26s %-14s %12.3f %12.3f %8.2fx %6s\n", r.name.c_str(), r.size.c_str(),
                    r.serial_ms, r.parallel_ms, r.serial_ms / r.parallel_ms,
                    r.identical ? "yes" : "NO");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Serial-vs-OpenMP kernel benchmark"};
    std::size_t points = 200000;
    std::size_t matrix_n = 768;
    int reps = 5;
    bool quick = false;
    app.add_option("--points", points, "Cloud size for the per-point kernels");
    app.add_option("--matrix", matrix_n, "Side length for the matrix kernels");
    app.add_option("--reps", reps, "Repetitions (best-of)");
    app.add_flag("--quick", quick, "Tiny sizes, one rep (smoke test)");
    CLI11_PARSE(app, argc, argv);

    if (quick) {
        points = 2000;
        matrix_n = 64;
        reps = 1;
    }

#ifdef _OPENMP
    std::printf("openmp: %d threads\n\n", omp_get_max_threads());
#else
    std::printf("openmp: disabled (serial build)\n\n");
#endif

    Rng rng(2024);
    std::vector<Row> rows;

    {
        auto pc = random_cloud(rng, points, 3, -30, 30);
        const auto bb = bounding_box(pc);
        const CurveConfig cfg(3, 16);
        std::vector<uint128> ref(points), out(points);
        for (auto scheme : {OrderScheme::hilbert, OrderScheme::morton}) {
            Row r;
            r.name = scheme == OrderScheme::hilbert ? "curve_keys/hilbert" : "curve_keys/morton";
            r.size = std::to_string(points) + " pts";
            r.serial_ms = time_best_ms(
                reps, [&] { kernels::curve_keys_serial(pc, bb, cfg, scheme, ref); });
            r.parallel_ms =
                time_best_ms(reps, [&] { kernels::curve_keys(pc, bb, cfg, scheme, out); });
            r.identical = ref == out;
            rows.push_back(r);
        }
    }

    {
        auto X = random_cloud(rng, matrix_n, 3, -30, 30);
        auto Y = random_cloud(rng, matrix_n, 3, -30, 30);
        std::vector<double> ref(matrix_n * matrix_n), out(matrix_n * matrix_n);
        Row r;
        r.name = "pairwise_cost/sq_eucl";
        r.size = std::to_string(matrix_n) + "x" + std::to_string(matrix_n);
        r.serial_ms = time_best_ms(reps, [&] {
            kernels::pairwise_cost_serial(X, Y, GroundMetric::sq_euclidean, ref);
        });
        r.parallel_ms = time_best_ms(
            reps, [&] { kernels::pairwise_cost(X, Y, GroundMetric::sq_euclidean, out); });
        r.identical = ref == out;
        rows.push_back(r);

        std::vector<double> nref(matrix_n), nout(matrix_n);
        Row nn;
        nn.name = "nn_min_sqdist";
        nn.size = r.size;
        nn.serial_ms = time_best_ms(reps, [&] { kernels::nn_min_sqdist_serial(X, Y, nref); });
        nn.parallel_ms = time_best_ms(reps, [&] { kernels::nn_min_sqdist(X, Y, nout); });
        nn.identical = nref == nout;
        rows.push_back(nn);

        std::vector<double> sref(matrix_n), sout(matrix_n);
        Row self;
        self.name = "self_nn_min_sqdist";
        self.size = std::to_string(matrix_n) + " pts";
        self.serial_ms =
            time_best_ms(reps, [&] { kernels::self_nn_min_sqdist_serial(X, sref); });
        self.parallel_ms = time_best_ms(reps, [&] { kernels::self_nn_min_sqdist(X, sout); });
        self.identical = sref == sout;
        rows.push_back(self);
    }

    {
        const std::size_t n = matrix_n;
        std::vector<double> cost(n * n), f(n, 0.0), g(n, 0.0);
        for (auto& v : cost) v = uniform01(rng) * 10.0;
        const double eps = 0.01, lw = -std::log(static_cast<double>(n));
        std::vector<double> ref(n), out(n);
        Row r;
        r.name = "softmin_update (rows)";
        r.size = std::to_string(n) + "x" + std::to_string(n);
        r.serial_ms = time_best_ms(
            reps, [&] { kernels::softmin_update_serial(cost, n, n, false, eps, lw, g, ref); });
        r.parallel_ms = time_best_ms(
            reps, [&] { kernels::softmin_update(cost, n, n, false, eps, lw, g, out); });
        r.identical = ref == out;
        rows.push_back(r);

        std::vector<double> kernel(n * n), v(n, 1.0);
        for (auto& x : kernel) x = uniform01(rng) + 1e-3;
        Row s;
        s.name = "scaling_update (rows)";
        s.size = r.size;
        s.serial_ms = time_best_ms(
            reps, [&] { kernels::scaling_update_serial(kernel, n, n, false, 1.0 / n, v, ref); });
        s.parallel_ms = time_best_ms(
            reps, [&] { kernels::scaling_update(kernel, n, n, false, 1.0 / n, v, out); });
        s.identical = ref == out;
        rows.push_back(s);
    }

    {
        auto pc = random_cloud(rng, points, 3, -30, 30);
        const double p[3] = {1.0, -2.0, 0.5};
        std::vector<double> ref(points, 1e30), out(points, 1e30);
        Row r;
        r.name = "fps_relax";
        r.size = std::to_string(points) + " pts";
        r.serial_ms = time_best_ms(reps, [&] { kernels::fps_relax_serial(pc, p, ref); });
        r.parallel_ms = time_best_ms(reps, [&] { kernels::fps_relax(pc, p, out); });
        r.identical = ref == out;
        rows.push_back(r);
    }

    print_rows(rows);
    for (const auto& r : rows)
        if (!r.identical) {
            std::fprintf(stderr, "mismatch between serial and parallel results: %s\n",
                         r.name.c_str());
            return 1;
        }
    return 0;
}
