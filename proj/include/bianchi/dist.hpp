#pragma once
#include <vector>

#include "bianchi/symbols.hpp"

namespace bianchi {

// Moments m[i][j] = mu(x^i y^j), 0 <= i, j < M, with precision profile N(i, j) = max(1, N - max(i, j)).
struct FinDist {
  int64_t p = 5;
  int k = 0, l = 0, M = 1, N = 1;
  std::vector<PadicNum> m;

  static FinDist zero(int64_t p, int k, int l, int M, int N);
  // moments given as integers (reduced to the profile)
  static FinDist from_ints(int64_t p, int k, int l, int M, int N, const std::vector<int64_t>& vals);
  int profile(int i, int j) const { return std::max(1, N - std::max(i, j)); }
  PadicNum& at(int i, int j) { return m[(size_t)(i * M + j)]; }
  const PadicNum& at(int i, int j) const { return m[(size_t)(i * M + j)]; }
  // true iff every moment is stored exactly at its profile precision
  bool profile_exact() const;
  // congruent to o moment by moment modulo the profile
  bool agrees(const FinDist& o) const;
  int min_valuation() const;  // over nonzero moments; N if all vanish
};

// Entries under (sigma1, sigma2): the first variable sees (a1 b1; c1 d1), the second (a2 b2; c2 d2).
struct Sigma0Matrix {
  PadicNum a1, b1, c1, d1, a2, b2, c2, d2;
  // p | c, a a unit, det nonzero (in both completions)
  bool valid() const;
  static Sigma0Matrix from_global(const FieldK& K, const PadicEmbedding& emb, const Mat2K& g, int prec);
  static Sigma0Matrix from_pairs(const Mat2<PadicNum>& g1, const Mat2<PadicNum>& g2);
  Mat2<PadicNum> first() const { return {a1, b1, c1, d1}; }
  Mat2<PadicNum> second() const { return {a2, b2, c2, d2}; }
};
Sigma0Matrix operator*(const Sigma0Matrix& g, const Sigma0Matrix& h);

// (mu|g)(f) = mu((a1 + c1 x)^k (a2 + c2 y)^l f((b1 + d1 x)/(a1 + c1 x), (b2 + d2 y)/(a2 + c2 y)))
// a right action: weight_action(h, weight_action(g, mu)) = weight_action(g h, mu)
FinDist weight_action(const Sigma0Matrix& g, const FinDist& mu);

// rho(mu)(X^{k-i} Y^i Xbar^{l-j} Ybar^j) = mu(x^i y^j)
DualPoly<PadicNum> specialize(const FinDist& mu);

// log_p of sup_{i,j} |m_ij|_p p^{u i + v j} over tracked moments; zero distribution has norm 0
struct DistNorm {
  bool zero = true;
  int log_p = 0;
  double value() const;
};
DistNorm dist_norm(const FinDist& mu, int u, int v);

// ---- integer kernel used by the lift: moments mod q = p^N, row-major M x M ----
// T[i][i'] = C(i, i') beta^{i - i'} scale^{i'} mod q, so that x -> beta + scale x
std::vector<int64_t> translation_matrix(int64_t beta, int64_t scale, int M, int64_t q);
// out[i][j] = Sum A[i][i'] B[j][j'] in[i'][j'] mod q (A, B lower triangular)
void apply_lower(const std::vector<int64_t>& A, const std::vector<int64_t>& B, const int64_t* in, int64_t* out,
                 int M, int64_t q, int64_t* scratch);

}  // namespace bianchi
