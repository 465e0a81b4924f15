// Benchmark: the OpenMP-parallel Hecke kernel (sum of the coset-representative
// actions plus reduction) against the serial reference path, on the rank-2 and
// rank-3 complexes.  The two paths must produce identical matrices.

#include <chrono>
#include <cstdio>

#include "shtor/hecke.hpp"

using namespace shtor;
using namespace shtor::hecke;

namespace {

double seconds(const std::function<void()>& body) {
  auto t0 = std::chrono::steady_clock::now();
  body();
  auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

void bench_case(int m, int N, int node, long ell, int k, long p) {
  std::vector<int> dims = m == 2 ? std::vector<int>{0, 1} : std::vector<int>{1, 2, 3};
  auto cx = congruence::assemble_complex(m, N, dims);
  NodeHomology h(cx, node);
  HeckeOperator op = double_coset_reps(m, ell, k, N);

  linalg::FpMatrix serial_mat, parallel_mat;
  HeckeOptions serial;
  serial.parallel = false;
  double ts = seconds([&] { serial_mat = h.matrix_mod_p(op, p, serial); });
  HeckeOptions parallel;
  parallel.parallel = true;
  double tp = seconds([&] { parallel_mat = h.matrix_mod_p(op, p, parallel); });

  bool same = serial_mat == parallel_mat;
  std::printf("m=%d N=%d %s mod %ld (%zu reps): serial %.3fs  parallel %.3fs  x%.2f  %s\n", m,
              N, op.name().c_str(), p, op.reps.size(), ts, tp, ts / (tp > 0 ? tp : 1e-9),
              same ? "identical" : "MISMATCH");
  if (!same) std::exit(1);
}

}  // namespace

int main() {
#ifdef SHTOR_OPENMP
  std::printf("OpenMP kernels enabled\n");
#else
  std::printf("OpenMP disabled at configure time; comparing two serial runs\n");
#endif
  bench_case(2, 11, 1, 2, 1, 97);
  bench_case(2, 11, 1, 7, 1, 97);
  bench_case(2, 23, 1, 5, 1, 97);
  bench_case(3, 5, 2, 2, 1, 13);
  bench_case(3, 5, 2, 3, 1, 13);
  return 0;
}
