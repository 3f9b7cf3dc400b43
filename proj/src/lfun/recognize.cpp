#include <cmath>

#include "bianchi/lfun.hpp"

namespace bianchi {

namespace mp = boost::multiprecision;

namespace {

using IntVec = std::vector<mpz_class>;

Real to_real(const mpz_class& z) {
  Real r;
  mpfr_set_z(r.backend().data(), z.get_mpz_t(), MPFR_RNDN);
  return r;
}

mpz_class round_to_z(const Real& x) {
  mpz_class z;
  Real r = mp::round(x);
  mpfr_get_z(z.get_mpz_t(), r.backend().data(), MPFR_RNDN);
  return z;
}

Real dot(const std::vector<Real>& a, const std::vector<Real>& b) {
  Real s(0);
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// textbook LLL (delta = 0.99) with Gram-Schmidt recomputed after each change; the dimensions here are tiny
void lll(std::vector<IntVec>& basis) {
  const size_t n = basis.size();
  auto gso = [&](std::vector<std::vector<Real>>& bstar, std::vector<std::vector<Real>>& mu, std::vector<Real>& nrm) {
    bstar.assign(n, {});
    mu.assign(n, std::vector<Real>(n, Real(0)));
    nrm.assign(n, Real(0));
    for (size_t i = 0; i < n; ++i) {
      std::vector<Real> v;
      for (auto& z : basis[i]) v.push_back(to_real(z));
      bstar[i] = v;
      for (size_t j = 0; j < i; ++j) {
        mu[i][j] = dot(v, bstar[j]) / nrm[j];
        for (size_t c = 0; c < v.size(); ++c) bstar[i][c] -= mu[i][j] * bstar[j][c];
      }
      nrm[i] = dot(bstar[i], bstar[i]);
    }
  };
  std::vector<std::vector<Real>> bstar, mu;
  std::vector<Real> nrm;
  gso(bstar, mu, nrm);
  size_t k = 1;
  int guard = 0;
  while (k < n && guard++ < 100000) {
    for (size_t j = k; j-- > 0;) {
      mpz_class q = round_to_z(mu[k][j]);
      if (q != 0) {
        for (size_t c = 0; c < basis[k].size(); ++c) basis[k][c] -= q * basis[j][c];
        gso(bstar, mu, nrm);
      }
    }
    if (nrm[k] >= (Real(0.99) - mu[k][k - 1] * mu[k][k - 1]) * nrm[k - 1]) {
      ++k;
    } else {
      std::swap(basis[k], basis[k - 1]);
      gso(bstar, mu, nrm);
      k = std::max<size_t>(k - 1, 1);
    }
  }
}

Real vec_len(const IntVec& v) {
  Real s(0);
  for (auto& z : v) s += to_real(z) * to_real(z);
  return mp::sqrt(s);
}

// integer relation d z = Sum_j n_j basis_j with 2 real equations; returns (d, n_1..n_k) and the margin
struct Relation {
  std::vector<mpz_class> coeffs;
  double margin = 0;
};
Relation find_relation(const Complex& z, const std::vector<Complex>& basis, double err) {
  const size_t k = basis.size();
  // scale so that the residual of the true relation stays O(1)
  double lg = std::min(-std::log10(std::max(err, 1e-300)) - 2, (double)working_digits() - 5);
  Real C = mp::pow(Real(10), Real(lg));
  std::vector<IntVec> B;
  auto row = [&](size_t idx, const Complex& v) {
    IntVec r(k + 3, 0);
    r[idx] = 1;
    r[k + 1] = round_to_z(C * v.re);
    r[k + 2] = round_to_z(C * v.im);
    return r;
  };
  B.push_back(row(0, z));
  for (size_t j = 0; j < k; ++j) B.push_back(row(j + 1, -basis[j]));
  lll(B);
  Relation out;
  out.coeffs.assign(B[0].begin(), B[0].begin() + (long)(k + 1));
  Real l1 = vec_len(B[0]), l2 = vec_len(B[1]);
  out.margin = l1 == 0 ? 0 : (l2 / l1).convert_to<double>();
  return out;
}

mpz_class abs_max(const std::vector<mpz_class>& v) {
  mpz_class m = 0;
  for (auto& x : v) m = std::max(m, mpz_class(abs(x)));
  return m;
}

const double kMinMargin = 1e6;

}  // namespace

Recognition rationalize(const Complex& z, int64_t m, const mpz_class& height, double err) {
  Recognition rec;
  const int64_t deg = euler_phi(m);
  if (deg > 2) {
    rec.reason = "rationalize: degree > 2 needs a Galois orbit";
    return rec;
  }
  std::vector<Complex> basis{Complex(Real(1))};
  if (deg == 2) basis.push_back(root_of_unity_mp(m, 1));
  // a real target with a rational basis has only one equation; the imaginary row is zero then
  Relation rel = find_relation(z, basis, err);
  rec.margin = rel.margin;
  mpz_class d = rel.coeffs[0];
  if (d == 0) {
    rec.reason = "no relation with nonzero denominator";
    return rec;
  }
  std::vector<mpq_class> c;
  for (int64_t j = 0; j < deg; ++j) {
    mpq_class q(rel.coeffs[(size_t)j + 1], d);
    q.canonicalize();
    c.push_back(q);
  }
  if (deg == 1) c.resize(1);
  rec.value = CycNum(deg == 1 ? 1 : m, c).minimized();
  rec.residual = (to_mp(rec.value) - z).abs().convert_to<double>();
  bool small = abs_max(rel.coeffs) <= height;
  rec.ok = small && rec.margin > kMinMargin && rec.residual <= std::max(err, 1e-300) * 1e3;
  if (!rec.ok)
    rec.reason = !small ? "height bound exceeded" : rec.margin <= kMinMargin ? "LLL margin too small" : "residual too large";
  return rec;
}

Recognition recognize_in_K(const FieldK& K, const Complex& z, const mpz_class& height, double err) {
  Recognition rec;
  std::vector<Complex> basis{Complex(Real(1)), to_mp(K, IntElem{0, 1})};
  Relation rel = find_relation(z, basis, err);
  rec.margin = rel.margin;
  mpz_class d = rel.coeffs[0];
  if (d == 0) {
    rec.reason = "no relation with nonzero denominator";
    return rec;
  }
  mpq_class x(rel.coeffs[1], d), y(rel.coeffs[2], d);
  x.canonicalize();
  y.canonicalize();
  rec.value = K.to_cyc(x, y).minimized();
  rec.residual = (to_mp(rec.value) - z).abs().convert_to<double>();
  bool small = abs_max(rel.coeffs) <= height;
  rec.ok = small && rec.margin > kMinMargin && rec.residual <= std::max(err, 1e-300) * 1e3;
  if (!rec.ok)
    rec.reason = !small ? "height bound exceeded" : rec.margin <= kMinMargin ? "LLL margin too small" : "residual too large";
  return rec;
}

OrbitSolve solve_galois_orbit(const FieldK& K, int64_t r, const std::vector<int64_t>& exps,
                              const std::vector<Complex>& members, const mpz_class& height, double err) {
  OrbitSolve out;
  const size_t n = (size_t)euler_phi(r);
  if (exps.size() != n || members.size() != n) {
    out.reason = "orbit size does not match phi(r)";
    return out;
  }
  // members[g] = Sum_j c_j zeta_r^{j exps[g]}
  std::vector<std::vector<Complex>> M(n, std::vector<Complex>(n + 1));
  for (size_t g = 0; g < n; ++g) {
    for (size_t j = 0; j < n; ++j) M[g][j] = root_of_unity_mp(r, (int64_t)j * exps[g]);
    M[g][n] = members[g];
  }
  for (size_t col = 0; col < n; ++col) {
    size_t piv = col;
    for (size_t i = col + 1; i < n; ++i)
      if (M[i][col].norm() > M[piv][col].norm()) piv = i;
    std::swap(M[col], M[piv]);
    if (M[col][col].norm() == 0) {
      out.reason = "singular Vandermonde system";
      return out;
    }
    for (size_t i = 0; i < n; ++i) {
      if (i == col) continue;
      Complex f = M[i][col] / M[col][col];
      for (size_t c = col; c <= n; ++c) M[i][c] -= f * M[col][c];
    }
  }
  // the coordinates inherit roughly n times the input error
  const double cerr = err * (double)n * 10;
  std::vector<CycNum> coords;
  for (size_t j = 0; j < n; ++j) {
    Complex cj = M[j][n] / M[j][j];
    Recognition rec = recognize_in_K(K, cj, height, cerr);
    out.margin = std::min(out.margin, rec.margin);
    if (!rec.ok) {
      out.reason = "coordinate " + std::to_string(j) + ": " + rec.reason;
      return out;
    }
    coords.push_back(rec.value);
  }
  for (size_t g = 0; g < n; ++g) {
    CycNum v;
    for (size_t j = 0; j < n; ++j) v += coords[j] * CycNum::root_of_unity(r, (int64_t)j * exps[g]);
    v = v.minimized();
    out.residual = std::max(out.residual, (to_mp(v) - members[g]).abs().convert_to<double>());
    out.values.push_back(v);
  }
  out.ok = out.residual <= std::max(err, 1e-300) * 1e3;
  if (!out.ok) out.reason = "orbit residual too large";
  return out;
}

}  // namespace bianchi
