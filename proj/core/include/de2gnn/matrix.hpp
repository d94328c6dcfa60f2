#pragma once

#include <cassert>
#include <cstdint>
#include <random>
#include <vector>

namespace de2gnn {

// Row-major dense matrix of doubles. Small helper type, not a linear
// algebra library; only the operations the training engine needs exist.
struct DenseMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  DenseMatrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

  double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
  double* row(int r) { return data.data() + static_cast<std::size_t>(r) * cols; }
  const double* row(int r) const { return data.data() + static_cast<std::size_t>(r) * cols; }
  std::size_t size() const { return data.size(); }
  bool same_shape(const DenseMatrix& o) const { return rows == o.rows && cols == o.cols; }
};

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
// aT_b(a, b) = transpose(a) * b without materializing the transpose.
DenseMatrix matmul_at_b(const DenseMatrix& a, const DenseMatrix& b);
// a_bt(a, b) = a * transpose(b).
DenseMatrix matmul_a_bt(const DenseMatrix& a, const DenseMatrix& b);
// y += alpha * x
void axpy(DenseMatrix& y, const DenseMatrix& x, double alpha);
double frobenius_norm(const DenseMatrix& m);
double sum_squares(const DenseMatrix& m);
bool all_finite(const DenseMatrix& m);

// CSR sparse matrix. Used for feature matrices (bag-of-words rows are
// sparse) so the input-layer products do not pay for structural zeros.
struct CsrMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<std::int64_t> row_ptr{0};
  std::vector<int> col;
  std::vector<double> val;

  std::int64_t nnz() const { return static_cast<std::int64_t>(col.size()); }
};

CsrMatrix csr_from_dense(const DenseMatrix& m);
DenseMatrix csr_matmul(const CsrMatrix& a, const DenseMatrix& b);
// transpose(a) * b, computed by scattering rows; output is cols(a) x cols(b).
DenseMatrix csr_at_b(const CsrMatrix& a, const DenseMatrix& b);

// Deterministic RNG. mt19937_64 has a fully specified bit stream; the
// distribution helpers are hand-rolled because the std distributions are
// implementation-defined and results must reproduce across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // [0, 1)
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // [0, n)
  int uniform_int(int n) {
    assert(n > 0);
    // rejection sampling to stay unbiased
    const std::uint64_t bound = ~std::uint64_t{0} - ~std::uint64_t{0} % static_cast<std::uint64_t>(n);
    std::uint64_t x = gen_();
    while (x >= bound) x = gen_();
    return static_cast<int>(x % static_cast<std::uint64_t>(n));
  }

  double normal();

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_int(static_cast<int>(i)));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace de2gnn
