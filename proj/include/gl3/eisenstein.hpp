// eisenstein.hpp
//
// Fourier coefficients of the minimal and maximal Eisenstein series,
//
//   A_mu(m, 1)    = sum_{d1 d2 d3 = m} d1^mu1 d2^mu2 d3^mu3,
//   B_{mu,g}(m,1) = sum_{d1 d2 = m} lambda_g(d1) d1^mu d2^{-2 mu},
//   X(m, n)       = sum_{d | (m, n)} mobius(d) X(m/d, 1) X(1, n/d),
//
// with X(1, n) the dual coefficient (the complex conjugate of X(n, 1) on the
// unitary axis), the normalizers
//
//   N_mu     = (1/16) prod_k |zeta(1 + 3 nu_k)|^2,
//   N_{mu,g} = 8 L(1, Ad^2 g) |L(1 + 3 mu, g)|^2,
//
// and coefficient sources for GL(2) Hecke eigenvalues: a text table or a
// synthetic multiplicative generator.  Synthetic data satisfies the Hecke
// relations but is not automorphic.

#pragma once

#include <cstdint>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gl3/arith.hpp"
#include "gl3/spectral.hpp"

namespace gl3 {

class InsufficientData : public std::runtime_error {
 public:
  explicit InsufficientData(const std::string& what) : std::runtime_error(what) {}
};

// Raised by the table parser; carries the offending line number.
class TableFormatError : public std::runtime_error {
 public:
  TableFormatError(int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

// Exponent in the Kim-Sarnak bound |lambda(n)| <= tau(n) n^{7/64}.
inline constexpr double kKimSarnak = 7.0 / 64.0;

class CoefficientSource {
 public:
  enum class Kind { FileTable, Synthetic };

  // Parses `n<TAB>re<TAB>im` rows with optional headers
  // `# mu_g <re> <im>`, `# L_ad <value>`, `# norm <value>`.  Other lines
  // starting with '#' are comments.  Rows must cover n = 1..N without gaps.
  static CoefficientSource from_stream(std::istream& in);
  static CoefficientSource from_file(const std::string& path);

  // lambda(p) = 2 cos(theta_p) with cos(theta_p) drawn uniformly from
  // [-c_p, c_p], c_p = min(1, p^{7/64}/2, sqrt(1 - p^{-7/16})); extended by
  // the Hecke recursion and multiplicativity.  Every value then satisfies
  // |lambda(n)| <= n^{7/64}.  L_ad is the placeholder 1.0.
  static CoefficientSource synthetic(std::uint64_t seed, i64 max_n, double mu_g_imag = 0.0);

  Kind kind() const { return kind_; }
  i64 max_n() const { return static_cast<i64>(lambda_.size()) - 1; }
  // Throws InsufficientData when n exceeds the table.
  cplx lambda(i64 n) const;
  cplx mu_g() const { return mu_g_; }
  double L_ad() const { return L_ad_; }
  bool has_L_ad() const { return has_L_ad_; }
  double norm() const { return norm_; }

  // Largest |lambda(n)| / (tau(n) n^{7/64 + slack}) over the table.
  double kim_sarnak_ratio(double slack = 0.01) const;

 private:
  Kind kind_ = Kind::Synthetic;
  std::vector<cplx> lambda_;  // index 0 unused
  cplx mu_g_{0.0, 0.0};
  double L_ad_ = 1.0;
  bool has_L_ad_ = false;
  double norm_ = 1.0;
};

// A_mu(m, n).  The dual coefficient A(1, n) is evaluated as A_{-mu}(n, 1),
// which equals conj(A_mu(n, 1)) for mu in (iR)^3.
cplx coeff_minimal(const SpectralPoint& mu, i64 m, i64 n);

// B_{mu,g}(m, n).  B(1, n) = sum_{d1 d2 = n} conj(lambda(d1)) d1^{-mu} d2^{2 mu},
// the conjugate of B(n, 1) for mu in iR.
cplx coeff_maximal(cplx mu, const CoefficientSource& g, i64 m, i64 n);

// Throws PoleError when some nu_k = 0.
double norm_minimal(const SpectralPoint& mu);

struct NormResult {
  double value = 0.0;
  double error_estimate = 0.0;
  cplx L_value{0.0, 0.0};   // truncated L(1 + 3 mu, g)
  i64 cutoff = 0;
};

// Partial-sum L(1 + 3 mu, g) = sum_{n <= X} lambda(n) n^{-1-3 mu}.  The error
// estimate is |L_X - L_{X/2}|.  cutoff = 0 uses the whole table; a cutoff
// beyond the table throws InsufficientData, as does a relative error
// estimate above tol.  L_ad <= 0 uses the source's value.
NormResult norm_maximal(cplx mu, const CoefficientSource& g, double L_ad = 0.0, i64 cutoff = 0,
                        double tol = 1.0);

// Synthetic GL(3) Hecke data from unitary Satake triples: A(p^k, 1) is the
// complete homogeneous polynomial h_k(alpha_p), alpha_p = (e^{ia}, e^{ib}, e^{-i(a+b)}).
class SyntheticGl3Source {
 public:
  SyntheticGl3Source(std::uint64_t seed, i64 max_n);
  cplx A(i64 m, i64 n) const;
  i64 max_n() const { return static_cast<i64>(a_.size()) - 1; }

 private:
  std::vector<cplx> a_;  // A(n, 1)
};

}  // namespace gl3
