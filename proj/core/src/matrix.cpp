#include "de2gnn/matrix.hpp"

#include <cmath>

namespace de2gnn {

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  assert(a.cols == b.rows);
  DenseMatrix out(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i) {
    const double* arow = a.row(i);
    double* orow = out.row(i);
    for (int k = 0; k < a.cols; ++k) {
      const double aik = arow[k];
      if (aik == 0.0) continue;
      const double* brow = b.row(k);
      for (int j = 0; j < b.cols; ++j) orow[j] += aik * brow[j];
    }
  }
  return out;
}

DenseMatrix matmul_at_b(const DenseMatrix& a, const DenseMatrix& b) {
  assert(a.rows == b.rows);
  DenseMatrix out(a.cols, b.cols);
  for (int r = 0; r < a.rows; ++r) {
    const double* arow = a.row(r);
    const double* brow = b.row(r);
    for (int i = 0; i < a.cols; ++i) {
      const double ari = arow[i];
      if (ari == 0.0) continue;
      double* orow = out.row(i);
      for (int j = 0; j < b.cols; ++j) orow[j] += ari * brow[j];
    }
  }
  return out;
}

DenseMatrix matmul_a_bt(const DenseMatrix& a, const DenseMatrix& b) {
  assert(a.cols == b.cols);
  DenseMatrix out(a.rows, b.rows);
  for (int i = 0; i < a.rows; ++i) {
    const double* arow = a.row(i);
    double* orow = out.row(i);
    for (int j = 0; j < b.rows; ++j) {
      const double* brow = b.row(j);
      double s = 0.0;
      for (int k = 0; k < a.cols; ++k) s += arow[k] * brow[k];
      orow[j] = s;
    }
  }
  return out;
}

void axpy(DenseMatrix& y, const DenseMatrix& x, double alpha) {
  assert(y.same_shape(x));
  for (std::size_t i = 0; i < y.data.size(); ++i) y.data[i] += alpha * x.data[i];
}

double sum_squares(const DenseMatrix& m) {
  double s = 0.0;
  for (double v : m.data) s += v * v;
  return s;
}

double frobenius_norm(const DenseMatrix& m) { return std::sqrt(sum_squares(m)); }

bool all_finite(const DenseMatrix& m) {
  for (double v : m.data)
    if (!std::isfinite(v)) return false;
  return true;
}

CsrMatrix csr_from_dense(const DenseMatrix& m) {
  CsrMatrix out;
  out.rows = m.rows;
  out.cols = m.cols;
  out.row_ptr.assign(1, 0);
  out.row_ptr.reserve(static_cast<std::size_t>(m.rows) + 1);
  for (int i = 0; i < m.rows; ++i) {
    const double* row = m.row(i);
    for (int j = 0; j < m.cols; ++j) {
      if (row[j] != 0.0) {
        out.col.push_back(j);
        out.val.push_back(row[j]);
      }
    }
    out.row_ptr.push_back(static_cast<std::int64_t>(out.col.size()));
  }
  return out;
}

DenseMatrix csr_matmul(const CsrMatrix& a, const DenseMatrix& b) {
  assert(a.cols == b.rows);
  DenseMatrix out(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i) {
    double* orow = out.row(i);
    for (std::int64_t e = a.row_ptr[i]; e < a.row_ptr[i + 1]; ++e) {
      const double v = a.val[e];
      const double* brow = b.row(a.col[e]);
      for (int j = 0; j < b.cols; ++j) orow[j] += v * brow[j];
    }
  }
  return out;
}

DenseMatrix csr_at_b(const CsrMatrix& a, const DenseMatrix& b) {
  assert(a.rows == b.rows);
  DenseMatrix out(a.cols, b.cols);
  for (int i = 0; i < a.rows; ++i) {
    const double* brow = b.row(i);
    for (std::int64_t e = a.row_ptr[i]; e < a.row_ptr[i + 1]; ++e) {
      const double v = a.val[e];
      double* orow = out.row(a.col[e]);
      for (int j = 0; j < b.cols; ++j) orow[j] += v * brow[j];
    }
  }
  return out;
}

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  // Box-Muller; u1 drawn from (0, 1] so the log is finite.
  const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * 3.14159265358979323846 * u2;
  spare_ = r * std::sin(theta);
  have_spare_ = true;
  return r * std::cos(theta);
}

}  // namespace de2gnn
