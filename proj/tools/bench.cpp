// Benchmark of the Monte Carlo kernels: serial reference loop against the
// OpenMP chunk-parallel path, checking bit-identical results while timing.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cutvol/body.hpp"
#include "cutvol/volume.hpp"

using namespace cutvol;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void bench_case(const char* name, const BodyModel& body, const Hyperplane& plane,
                std::uint64_t n) {
    const auto t0 = Clock::now();
    const CutVolumes serial = mc_cut_volumes(body, plane, n, 0, Exec::serial);
    const double ts = seconds_since(t0);

    const auto t1 = Clock::now();
    const CutVolumes parallel = mc_cut_volumes(body, plane, n, 0, Exec::parallel);
    const double tp = seconds_since(t1);

    const bool identical = serial.vplus.value == parallel.vplus.value &&
                           serial.vminus.value == parallel.vminus.value &&
                           serial.count_plus == parallel.count_plus &&
                           serial.count_minus == parallel.count_minus;
    std::printf("%-12s n=%-10llu serial %7.3f s   parallel %7.3f s   speedup %5.2fx   "
                "bit-identical %s\n",
                name, static_cast<unsigned long long>(n), ts, tp, ts / tp,
                identical ? "yes" : "NO");
    if (!identical) std::exit(1);
}

}  // namespace

int main(int argc, char** argv) {
    std::uint64_t n = 20000000;
    if (argc > 1) n = std::strtoull(argv[1], nullptr, 10);
#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP; both paths run serially\n");
#endif

    const BodyModel ball = BodyModel::ball(1.0, Eigen::VectorXd::Zero(3));
    bench_case("ball R^3", ball, Hyperplane(Eigen::Vector3d(1, 0, 0), -0.25), n);

    PsiSpec psi;
    psi.form = PsiSpec::Form::quadratic_diagonal;
    psi.m = 1;
    psi.coeffs = {1.0};
    const BodyModel tube = BodyModel::tube(psi, 0.3);
    bench_case("tube R^4", tube, Hyperplane(Eigen::Vector4d(1, 0, 0, 0), -0.1), n);

    const BodyModel ellipsoid = BodyModel::ellipsoid(Eigen::Vector3d(2.0, 1.0, 0.5));
    bench_case("ellipsoid", ellipsoid, Hyperplane(Eigen::Vector3d(0, 1, 0), -0.2), n);
    return 0;
}
