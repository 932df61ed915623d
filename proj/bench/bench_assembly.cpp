// Serial reference vs OpenMP policy for the assembly kernels, N in {16, 32, 64}.
#include <benchmark/benchmark.h>

#include "navslip/galerkin.hpp"
#include "navslip/kernels.hpp"

using namespace navslip;

namespace {

const Cavity box = Cavity::rectangle(2.0, 2.0);

SimParams params(int N) {
  SimParams p;
  p.rho_F = 1.0;
  p.rho_S = 2.0;
  p.mu_F = 0.05;
  p.beta_S = p.beta_Omega = 0.5;
  p.delta = 0.1;
  p.N = N;
  p.dt = 1e-3;
  return p;
}

Exec policy(const benchmark::State& st) { return st.range(1) ? Exec::parallel : Exec::serial; }

void label(benchmark::State& st) {
  st.SetLabel(st.range(1) ? "openmp x" + std::to_string(kernels::thread_count()) : "serial");
}

// Gram of a (2 * quadrature points) x N block, the inner product behind every matrix.
void BM_gram(benchmark::State& st) {
  const int N = static_cast<int>(st.range(0));
  const Eigen::MatrixXd L = Eigen::MatrixXd::Random(8192, N);
  Eigen::MatrixXd out;
  for (auto _ : st) {
    kernels::gram(L, out, policy(st));
    benchmark::DoNotOptimize(out.data());
  }
  label(st);
}

// One-off cavity integrals (convection tensor, viscous and wall blocks).
void BM_cavity_integrals(benchmark::State& st) {
  const Basis basis(box, static_cast<int>(st.range(0)));
  const int points = std::max(64, 4 * std::max(basis.max_i(), basis.max_j()) + 16);
  for (auto _ : st) {
    auto ci = cavity_integrals(basis, points, policy(st));
    benchmark::DoNotOptimize(ci.viscous.data());
  }
  label(st);
}

// Per-sweep solid-dependent assembly at a fixed placement.
void BM_assemble(benchmark::State& st) {
  const int N = static_cast<int>(st.range(0));
  const GalerkinModel model(box, SolidShape{0.25, 2.0}, params(N), policy(st));
  const Eigen::VectorXd alpha = Eigen::VectorXd::Constant(model.basis().size(), 0.01);
  const Placement at{{1.0, 1.2}, 0.1};
  for (auto _ : st) {
    auto parts = model.assemble(at, alpha);
    benchmark::DoNotOptimize(parts.A.data());
  }
  label(st);
}

void sizes(benchmark::internal::Benchmark* b) {
  for (int N : {16, 32, 64})
    for (int par : {0, 1}) b->Args({N, par});
  b->ArgNames({"N", "parallel"})->Unit(benchmark::kMillisecond);
}

}  // namespace

BENCHMARK(BM_gram)->Apply(sizes);
BENCHMARK(BM_cavity_integrals)->Apply(sizes);
BENCHMARK(BM_assemble)->Apply(sizes);

BENCHMARK_MAIN();
