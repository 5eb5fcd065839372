// Benchmark comparing the OpenMP kernels against the serial reference
// implementations on a Cantor-product workload. The two paths must agree bit
// for bit; this tool reports wall times and the speedup.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "treelab/kernel.hpp"
#include "treelab/measure.hpp"
#include "treelab/operators.hpp"
#include "treelab/realization.hpp"
#include "treelab/reference.hpp"

using namespace treelab;
using clock_type = std::chrono::steady_clock;

namespace {

double ms_since(clock_type::time_point start) {
    return std::chrono::duration<double, std::milli>(clock_type::now() - start).count();
}

struct Row {
    const char* name;
    double serial_ms;
    double parallel_ms;
    bool identical;
};

void print_rows(const std::vector<Row>& rows) {
    std::printf("%-22s %12s %12s %9s %10s\n", "kernel", "serial (ms)", "openmp (ms)",
                "speedup", "identical");
    for (const auto& r : rows)
        std::printf("%-22s %12.2f %12.2f %8.2fx %10s\n", r.name, r.serial_ms,
                    r.parallel_ms, r.serial_ms / r.parallel_ms,
                    r.identical ? "yes" : "NO");
}

}  // namespace

int main(int argc, char** argv) {
    int depth = 5;
    int reps = 3;
    for (int a = 1; a < argc; ++a) {
        if (std::strcmp(argv[a], "--depth") == 0 && a + 1 < argc)
            depth = std::atoi(argv[++a]);
        else if (std::strcmp(argv[a], "--reps") == 0 && a + 1 < argc)
            reps = std::atoi(argv[++a]);
        else {
            std::fprintf(stderr, "usage: treelab_bench [--depth D] [--reps R]\n");
            return 1;
        }
    }

#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (built without OpenMP)\n");
#endif

    DiscreteMeasure mu = gen_cantor_measure(2, 2, 0.42, depth, 7);
    std::printf("measure: %zu points, resolution scale %.3g\n\n", mu.size(),
                mu.resolution_scale());

    KernelSpec spec = make_kernel_spec(PhiSpec::euclidean(2), 0.5, 0.05, Mollifier::box);
    std::vector<Row> rows;

    {
        auto t0 = clock_type::now();
        KernelMatrix serial = reference::assemble_kernel_matrix(spec, mu);
        double ts = ms_since(t0);
        t0 = clock_type::now();
        KernelMatrix parallel = assemble_kernel_matrix(spec, mu);
        double tp = ms_since(t0);
        rows.push_back({"assemble_kernel", ts, tp, serial.values() == parallel.values()});

        std::vector<double> f(mu.size(), 1.0);
        t0 = clock_type::now();
        std::vector<double> us;
        for (int r = 0; r < reps; ++r) us = reference::apply_UK(serial, mu, f);
        ts = ms_since(t0);
        t0 = clock_type::now();
        std::vector<double> up;
        for (int r = 0; r < reps; ++r) up = apply_UK(parallel, mu, f);
        tp = ms_since(t0);
        rows.push_back({"apply_UK", ts, tp, us == up});

        t0 = clock_type::now();
        double ls = 0.0;
        for (int r = 0; r < reps; ++r) ls = reference::lower_constant(serial, mu);
        ts = ms_since(t0);
        t0 = clock_type::now();
        double lp = 0.0;
        for (int r = 0; r < reps; ++r) lp = lower_constant(parallel, mu);
        tp = ms_since(t0);
        rows.push_back({"lower_constant", ts, tp, ls == lp});
    }

    {
        std::vector<double> grid;
        for (int g = 0; g < 16; ++g) grid.push_back(0.2 + 0.05 * g);
        auto t0 = clock_type::now();
        std::vector<double> js = reference::scan_j_values(spec.phi, mu, grid, 0.05,
                                                          Mollifier::box);
        double ts = ms_since(t0);
        t0 = clock_type::now();
        GapScan scan = scan_gap(spec.phi, mu, 0.2, 0.95, 16, 0.05, 0.0, Mollifier::box);
        double tp = ms_since(t0);
        rows.push_back({"scan_gap (16 steps)", ts, tp, js == scan.j_values});
    }

    {
        DiscreteMeasure small = gen_cantor_measure(2, 2, 0.42, std::min(depth, 4), 7);
        auto t0 = clock_type::now();
        KernelMatrix serial = reference::triangle_kernel_matrix(0.5, 0.5, 0.5, 0.05,
                                                                small, Mollifier::box);
        double ts = ms_since(t0);
        t0 = clock_type::now();
        KernelMatrix parallel = triangle_kernel_matrix(0.5, 0.5, 0.5, 0.05, small,
                                                       Mollifier::box);
        double tp = ms_since(t0);
        rows.push_back({"triangle_kernel", ts, tp, serial.values() == parallel.values()});
    }

    print_rows(rows);
    for (const auto& r : rows)
        if (!r.identical) {
            std::fprintf(stderr, "mismatch between serial and parallel results\n");
            return 1;
        }
    return 0;
}
