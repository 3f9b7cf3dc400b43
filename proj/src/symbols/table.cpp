#include <fftw3.h>

#include <cmath>

#include "bianchi/symbols.hpp"

namespace bianchi {

namespace {

// element of Q(i) as x + y i from a CycNum of conductor dividing 4
std::optional<ElemK> cyc_to_gaussian(const CycNum& z) {
  CycNum m = z.minimized();
  if (m.conductor() <= 2) return ElemK(m.coeffs().empty() ? mpq_class(0) : m.coeffs()[0], mpq_class(0));
  if (m.conductor() == 4) return ElemK(m.coeffs()[0], m.coeffs()[1]);
  return std::nullopt;
}

int64_t vp(int64_t r, int64_t p, int cap) {
  if (r == 0) return cap;
  int v = 0;
  while (v < cap && r % p == 0) {
    r /= p;
    ++v;
  }
  return v;
}

}  // namespace

BaseChangeSymbol::BaseChangeSymbol(const BaseChange& bc, SymbolOptions opt) : bc_(&bc), opt_(opt) {
  if (bc.K->D() != 4) throw MathError("BaseChangeSymbol: only K = Q(i) is supported");
  prepare_units(8);
}

void BaseChangeSymbol::prepare_units(int prec) {
  const FieldK& K = *bc_->K;
  const int64_t p = bc_->emb->prime();
  ud_.prec = prec;
  ud_.mod = ipow(p, prec);
  const int64_t big = ipow(p, prec + 1);
  int64_t root = hensel_root(K.omega_minpoly(), p, prec + 1, mod64(bc_->emb->omega().residue(), p)).residue();
  ud_.root = mod64(root, ud_.mod);
  const int64_t rootb = mod64(K.omega_trace() - root, big);
  auto s1 = [&](const IntElem& x) { return mod64(mod64(x.x, big) + mulmod(mod64(x.y, big), root, big), big); };
  auto s2 = [&](const IntElem& x) { return mod64(mod64(x.x, big) + mulmod(mod64(x.y, big), rootb, big), big); };
  int64_t a1 = s1(bc_->pi_p), b1 = s1(bc_->pi_pbar), a2 = s2(bc_->pi_p), b2 = s2(bc_->pi_pbar);
  if (a1 % p || b2 % p || b1 % p == 0 || a2 % p == 0) throw MathError("BaseChangeSymbol: uniformizers do not match the embedding");
  ud_.rho1 = mod64(a1 / p, ud_.mod);
  ud_.tau1 = mod64(b1, ud_.mod);
  ud_.tau2 = mod64(a2, ud_.mod);
  ud_.rho2 = mod64(b2 / p, ud_.mod);
}

const SplitLevel& BaseChangeSymbol::split(int a, int b) const {
  auto it = splits_.find({a, b});
  if (it == splits_.end()) it = splits_.emplace(std::make_pair(a, b), split_level(*bc_, a, b)).first;
  return it->second;
}

const SymbolLevel& BaseChangeSymbol::level(int a, int b) const {
  auto it = levels_.find({a, b});
  if (it == levels_.end()) throw MathError("symbol level (" + std::to_string(a) + "," + std::to_string(b) + ") not built");
  return it->second;
}

const ExactLevelData& BaseChangeSymbol::exact_data(int a, int b) const {
  auto it = exact_.find({a, b});
  if (it == exact_.end()) throw MathError("no exact data at level (" + std::to_string(a) + "," + std::to_string(b) + ")");
  return it->second;
}

void BaseChangeSymbol::ensure_levels(int A, int B) {
  if (std::max(A, B) + 1 > ud_.prec) prepare_units(std::max(A, B) + 2);
  // bottom-up so that lower conductors exist first
  for (int tot = 0; tot <= A + B; ++tot)
    for (int a = 0; a <= A; ++a) {
      int b = tot - a;
      if (b < 0 || b > B || has_level(a, b)) continue;
      if (std::max(a, b) <= opt_.exact_max)
        build_exact(a, b);
      else
        build_deep(a, b);
    }
}

void BaseChangeSymbol::build_exact(int a, int b) {
  const FieldK& K = *bc_->K;
  const SplitLevel& lev = split(a, b);
  const int64_t n1 = lev.n1(), n2 = lev.n2(), G = n1 * n2;
  set_working_digits(bc_->digits);
  ExactLevelData ed;
  ed.a = a;
  ed.b = b;
  const int64_t Xconst = K.D() * K.w() / 2;  // D w / 2
  const int64_t L = lcm64(n1, n2);  // character values are L-th roots of unity
  std::optional<RecognizedLevel> loaded;
  if (opt_.load_level) loaded = opt_.load_level(a, b);
  if (loaded) {
    size_t expect = 0;
    for (auto [j1, j2] : lev.unit_trivial_characters())
      if (lev.conductor(j1, j2) == std::make_pair(a, b)) ++expect;
    if (loaded->lo.size() != expect) loaded.reset();
  }
  if (loaded) {
    for (auto& [j, lo] : loaded->lo) {
      CycNum W = gauss_sum_W(HeckeCharacter::from_split(K, lev, j.first, j.second));
      ed.lo[j] = lo;
      ed.X[j] = (W * lo * mpq_class(Xconst)).minimized();
    }
    ed.min_margin = loaded->min_margin;
    ed.from_cache = true;
  } else {
    auto ratios = level_ratios(*bc_, a, b);
    std::map<std::pair<int64_t, int64_t>, CycNum> Wex;
    std::map<std::pair<int64_t, int64_t>, Complex> Xnum;
    for (auto& [j, r] : ratios) {
      CycNum W = gauss_sum_W(HeckeCharacter::from_split(K, lev, j.first, j.second));
      Wex[j] = W;
      Xnum[j] = to_mp(W) * r * Real(Xconst);
    }
    std::map<std::pair<int64_t, int64_t>, bool> done;
    const double err = std::pow(10.0, -(bc_->digits - 10));
    for (const auto& entry : Xnum) {
      const auto& j = entry.first;
      if (done[j]) continue;
      CharOrbit orb = galois_orbit(lev, j.first, j.second);
      std::vector<Complex> members;
      for (auto& jj : orb.members) {
        auto it = Xnum.find(jj);
        if (it == Xnum.end()) throw MathError("exact inversion: Galois conjugate character missing");
        members.push_back(it->second);
      }
      const auto& keys = orb.members;
      OrbitSolve os = solve_galois_orbit(K, orb.r, orb.exps, members, opt_.height, err);
      if (!os.ok)
        throw MathError("exact inversion at level (" + std::to_string(a) + "," + std::to_string(b) + "): " + os.reason);
      ed.min_margin = std::min(ed.min_margin, os.margin);
      for (size_t g = 0; g < keys.size(); ++g) {
        ed.X[keys[g]] = os.values[g];
        ed.lo[keys[g]] = (os.values[g] / Wex[keys[g]] * mpq_class(1, Xconst)).minimized();
        done[keys[g]] = true;
      }
    }
    if (opt_.store_level) opt_.store_level(a, b, RecognizedLevel{ed.lo, ed.min_margin});
  }
  // S_g for all unit-trivial characters of the level
  const CycNum& lam = bc_->lambda;
  const CycNum one = CycNum::from_int(1);
  for (auto [j1, j2] : lev.unit_trivial_characters()) {
    auto [c1, c2] = lev.conductor(j1, j2);
    CycNum Sf;
    auto jr = lev.restrict_to(j1, j2, c1, c2);
    if (c1 == a && c2 == b) {
      Sf = ed.X.at({j1, j2}) * lam.pow(-(a + b));
    } else {
      Sf = exact_.at({c1, c2}).S.at(jr);
      // exact_ S at the primitive level is S_f there
    }
    const SplitLevel& lf = split(c1, c2);
    CycNum Z = one;
    if (a > 0 && c1 == 0) {
      int64_t d2 = lf.dlog2(lf.res2(bc_->pi_p));
      CycNum chi = c2 ? CycNum::root_of_unity(lf.n2(), jr.second * d2) : one;
      Z *= one - chi / lam;
    }
    if (b > 0 && c2 == 0) {
      int64_t d1 = lf.dlog1(lf.res1(bc_->pi_pbar));
      CycNum chi = c1 ? CycNum::root_of_unity(lf.n1(), jr.first * d1) : one;
      Z *= one - chi / lam;
    }
    ed.S[{j1, j2}] = (Z * Sf).minimized();
  }
  // c(b) = lambda^{a+b} / |G| Sum_chi chibar(b) S_g(chi)
  SymbolLevel sl;
  sl.a = a;
  sl.b = b;
  sl.n1 = n1;
  sl.n2 = n2;
  sl.exact = true;
  sl.num.assign((size_t)G, IntElem{});
  ed.c.assign((size_t)G, CycNum());
  mpq_class invG(1, G);
  CycNum pref = lam.pow(a + b) * invG;
  std::vector<std::pair<std::pair<int64_t, int64_t>, CycNum>> Slist(ed.S.begin(), ed.S.end());
  // unit classes: c is constant on cosets of the unit image, compute one representative per coset
  std::vector<int> seen((size_t)G, 0);
  for (int64_t d1 = 0; d1 < n1; ++d1)
    for (int64_t d2 = 0; d2 < n2; ++d2) {
      size_t idx = (size_t)(d1 * n2 + d2);
      if (seen[idx]) continue;
      CycNum s;
      for (auto& [j, S] : Slist)
        s += CycNum::root_of_unity(L, -(mod64(j.first * d1, n1) * (L / n1) + mod64(j.second * d2, n2) * (L / n2))) * S;
      CycNum cv = (pref * s).minimized();
      auto ek = cyc_to_gaussian(cv);
      if (!ek) throw MathError("exact inversion: symbol value " + cv.str() + " is not in Q(i)");
      mpq_class xs = ek->x * opt_.denominator, ys = ek->y * opt_.denominator;
      if (xs.get_den() != 1 || ys.get_den() != 1)
        throw MathError("exact inversion: symbol value " + cv.str() + " has denominator beyond the configured one");
      IntElem num{xs.get_num().get_si(), ys.get_num().get_si()};
      for (auto [u1, u2] : lev.unit_dlogs()) {
        size_t id2 = (size_t)(mod64(d1 + u1, n1) * n2 + mod64(d2 + u2, n2));
        seen[id2] = 1;
        sl.num[id2] = num;
        ed.c[id2] = cv;
      }
    }
  levels_[{a, b}] = std::move(sl);
  // the stored S at the primitive level is S_f; keep it under the level key for later restriction
  exact_[{a, b}] = std::move(ed);
}

const std::vector<std::complex<double>>& BaseChangeSymbol::primitive_sf(int a, int b) {
  auto it = sf_deep_.find({a, b});
  if (it != sf_deep_.end()) return it->second;
  const SplitLevel& lev = split(a, b);
  std::vector<std::complex<double>> out((size_t)(lev.n1() * lev.n2()), 0.0);
  const std::complex<double> lam = bc_->lambda.to_complex();
  if (std::max(a, b) <= opt_.exact_max) {
    ensure_levels(a, b);
    for (auto& [j, S] : exact_.at({a, b}).S)
      if (lev.conductor(j.first, j.second) == std::make_pair(a, b)) out[(size_t)(j.first * lev.n2() + j.second)] = S.to_complex();
  } else {
    DeepLevel dl = deep_level_ratios(*bc_, a, b);
    const double Xconst = (double)(bc_->K->D() * bc_->K->w() / 2);
    for (size_t k = 0; k < out.size(); ++k)
      if (dl.primitive[k]) out[k] = std::pow(lam, -(a + b)) * Xconst * dl.gauss[k] * dl.ratio[k];
  }
  return sf_deep_.emplace(std::make_pair(a, b), std::move(out)).first->second;
}

void BaseChangeSymbol::build_deep(int a, int b) {
  const SplitLevel& lev = split(a, b);
  const int64_t n1 = lev.n1(), n2 = lev.n2(), G = n1 * n2;
  const std::complex<double> lam = bc_->lambda.to_complex();
  fftw_complex* buf = fftw_alloc_complex((size_t)G);
  std::fill((double*)buf, (double*)buf + 2 * G, 0.0);
  for (int c1 = 0; c1 <= a; ++c1)
    for (int c2 = 0; c2 <= b; ++c2) {
      const auto& sf = primitive_sf(c1, c2);
      const SplitLevel& lf = split(c1, c2);
      const int64_t m1 = lf.n1(), m2 = lf.n2();
      // characters of conductor (c1, c2) at level (a, b) are j = j' * (n/m)
      std::complex<double> chi_p = 1.0, chi_pb = 1.0;
      int64_t dp = (c2 && a > 0 && c1 == 0) ? lf.dlog2(lf.res2(bc_->pi_p)) : 0;
      int64_t dpb = (c1 && b > 0 && c2 == 0) ? lf.dlog1(lf.res1(bc_->pi_pbar)) : 0;
      for (int64_t j1 = 0; j1 < m1; ++j1)
        for (int64_t j2 = 0; j2 < m2; ++j2) {
          std::complex<double> s = sf[(size_t)(j1 * m2 + j2)];
          if (s == 0.0) continue;
          std::complex<double> Z = 1.0;
          if (a > 0 && c1 == 0) {
            chi_p = std::polar(1.0, 2 * M_PI * (double)mod64(j2 * dp, m2) / (double)m2);
            Z *= 1.0 - chi_p / lam;
          }
          if (b > 0 && c2 == 0) {
            chi_pb = std::polar(1.0, 2 * M_PI * (double)mod64(j1 * dpb, m1) / (double)m1);
            Z *= 1.0 - chi_pb / lam;
          }
          size_t k = (size_t)((j1 * (n1 / m1)) * n2 + j2 * (n2 / m2));
          std::complex<double> v = Z * s;
          buf[k][0] += v.real();
          buf[k][1] += v.imag();
        }
    }
  fftw_plan plan = fftw_plan_dft_2d((int)n1, (int)n2, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  SymbolLevel sl;
  sl.a = a;
  sl.b = b;
  sl.n1 = n1;
  sl.n2 = n2;
  sl.num.resize((size_t)G);
  const std::complex<double> pref = std::pow(lam, a + b) / (double)G * (double)opt_.denominator;
  for (int64_t k = 0; k < G; ++k) {
    std::complex<double> v = pref * std::complex<double>(buf[k][0], buf[k][1]);
    double rx = std::round(v.real()), ry = std::round(v.imag());
    sl.max_round_residual = std::max(sl.max_round_residual, std::abs(v - std::complex<double>(rx, ry)));
    sl.num[(size_t)k] = IntElem{(int64_t)rx, (int64_t)ry};
  }
  fftw_free(buf);
  if (sl.max_round_residual > 0.05)
    throw MathError("deep inversion at level (" + std::to_string(a) + "," + std::to_string(b) +
                    "): values are not on the lattice (residual " + std::to_string(sl.max_round_residual) + ")");
  levels_[{a, b}] = std::move(sl);
}

RoundTrip BaseChangeSymbol::round_trip(int a, int b) const {
  RoundTrip rt;
  const ExactLevelData& ed = exact_data(a, b);
  const SplitLevel& lev = split(a, b);
  const int64_t n1 = lev.n1(), n2 = lev.n2(), L = lcm64(n1, n2);
  CycNum lam_pow = bc_->lambda.pow(a + b);
  for (auto& [j, S] : ed.S) {
    CycNum s;
    for (int64_t d1 = 0; d1 < n1; ++d1)
      for (int64_t d2 = 0; d2 < n2; ++d2)
        s += CycNum::root_of_unity(L, mod64(j.first * d1, n1) * (L / n1) + mod64(j.second * d2, n2) * (L / n2)) *
             ed.c[(size_t)(d1 * n2 + d2)];
    ++rt.checked;
    if (s.minimized() != (lam_pow * S).minimized())
      rt.failures.push_back("(" + std::to_string(j.first) + "," + std::to_string(j.second) + ")");
  }
  // the primitive inputs: lo recovered from S_f must equal the recognized L-value ratio
  const int64_t Xconst = bc_->K->D() * bc_->K->w() / 2;
  for (auto& [j, lo] : ed.lo) {
    CycNum W = gauss_sum_W(HeckeCharacter::from_split(*bc_->K, lev, j.first, j.second));
    CycNum back = (ed.S.at(j) * bc_->lambda.pow(a + b) / W * mpq_class(1, Xconst)).minimized();
    ++rt.checked;
    if (back != lo) rt.failures.push_back("lo(" + std::to_string(j.first) + "," + std::to_string(j.second) + ")");
  }
  return rt;
}

IntElem BaseChangeSymbol::value_num(int t, int s, int64_t r1, int64_t r2) const {
  const int64_t p = bc_->emb->prime();
  if (std::max(t, s) > ud_.prec - 1) throw MathError("value_num: level beyond prepared precision");
  const int64_t M1 = ipow(p, t), M2 = ipow(p, s);
  r1 = t ? mod64(r1, M1) : 0;
  r2 = s ? mod64(r2, M2) : 0;
  const int e1 = (int)vp(r1, p, t), e2 = (int)vp(r2, p, s);
  const int tt = t - e1, ss = s - e2;
  const SymbolLevel& sl = level(tt, ss);
  int64_t k1 = 0, k2 = 0;
  if (tt) {
    const int64_t m = ipow(p, tt);
    int64_t u = mulmod(powmod(ud_.rho1 % m, e1, m), powmod(ud_.tau1 % m, e2, m), m);
    int64_t x = mulmod(mod64(r1 / ipow(p, e1), m), invmod(u, m), m);
    k1 = split(tt, ss).dlog1(x);
  }
  if (ss) {
    const int64_t m = ipow(p, ss);
    int64_t u = mulmod(powmod(ud_.tau2 % m, e1, m), powmod(ud_.rho2 % m, e2, m), m);
    int64_t x = mulmod(mod64(r2 / ipow(p, e2), m), invmod(u, m), m);
    k2 = split(tt, ss).dlog2(x);
  }
  if (k1 < 0 || k2 < 0) throw MathError("value_num: reduction produced a non-unit");
  return sl.num[(size_t)(k1 * sl.n2 + k2)];
}

ElemK BaseChangeSymbol::value(int t, int s, int64_t r1, int64_t r2) const {
  IntElem n = value_num(t, s, r1, r2);
  mpq_class x(n.x, opt_.denominator), y(n.y, opt_.denominator);
  x.canonicalize();
  y.canonicalize();
  return ElemK(x, y);
}

ElemK BaseChangeSymbol::value_at(const ElemK& a) const {
  const int64_t p = bc_->emb->prime();
  mpz_class den = lcm(a.x.get_den(), a.y.get_den());
  int e = 0;
  mpz_class d = den;
  while (d % p == 0) {
    d /= p;
    ++e;
  }
  if (d != 1) throw MathError("value_at: denominator is not a power of p");
  // a = B0 / p^e and p = unit * pi pbar, so a = unit * B0 / (pi^e pibar^e); units do not change c
  mpz_class bx = mpq_class(a.x * den).get_num(), by = mpq_class(a.y * den).get_num();
  const int64_t M = ipow(p, e);
  if (e == 0) return value(0, 0, 0, 0);
  int64_t root = hensel_root(bc_->K->omega_minpoly(), p, e, mod64(bc_->emb->omega().residue(), p)).residue();
  int64_t rootb = mod64(bc_->K->omega_trace() - root, M);
  int64_t x = mpz_class(bx % mpz_class((long)M)).get_si(), y = mpz_class(by % mpz_class((long)M)).get_si();
  int64_t r1 = mod64(x + mulmod(mod64(y, M), root, M), M);
  int64_t r2 = mod64(x + mulmod(mod64(y, M), rootb, M), M);
  // p^e = unit * pi^e pibar^e with the configured uniformizers: the unit is global only up to the
  // rescaling, and c is invariant under global units, so the residues may be used directly
  return value(e, e, r1, r2);
}

CycNum BaseChangeSymbol::value_cyc(const ElemK& a) const {
  ElemK v = value_at(a);
  return bc_->K->to_cyc(v.x, v.y);
}

int BaseChangeSymbol::exact_levels() const {
  int n = 0;
  for (auto& [k, l] : levels_) n += l.exact;
  return n;
}
int BaseChangeSymbol::deep_levels() const { return (int)levels_.size() - exact_levels(); }
double BaseChangeSymbol::max_round_residual() const {
  double m = 0;
  for (auto& [k, l] : levels_) m = std::max(m, l.max_round_residual);
  return m;
}

CharOrbit galois_orbit(const SplitLevel& lev, int64_t j1, int64_t j2) {
  const int64_t n1 = lev.n1(), n2 = lev.n2();
  CharOrbit o;
  int64_t ord = lcm64(n1 / gcd64(mod64(j1, n1), n1), n2 / gcd64(mod64(j2, n2), n2));
  o.r = ord;
  while (o.r % 2 == 0) o.r /= 2;
  for (int64_t e = 1; e < std::max<int64_t>(o.r, 2); ++e) {
    if (o.r > 1 && gcd64(e, o.r) != 1) continue;
    // e' = 1 mod 4 and e' = e mod r fixes i and moves zeta_r
    int64_t ep = e;
    while (ep % 4 != 1) ep += o.r;
    o.members.push_back({mod64(j1 * ep, n1), mod64(j2 * ep, n2)});
    o.exps.push_back(o.r > 1 ? e : 0);
  }
  return o;
}

ElemK hecke_U_value(const BaseChangeSymbol& sym, bool at_p, int t, int s, int64_t r1, int64_t r2) {
  const auto& ud = sym.units();
  const int64_t p = sym.context().emb->prime();
  mpq_class sx = 0, sy = 0;
  for (int64_t beta = 0; beta < p; ++beta) {
    ElemK v;
    if (at_p) {
      // child (a + beta)/pi: numerator b + beta pi^t pibar^s at level (t+1, s)
      const int64_t m = ipow(p, t + 1);
      int64_t step = mulmod(mulmod(ipow(p, t) % m, powmod(ud.rho1 % m, t, m), m), powmod(ud.tau1 % m, s, m), m);
      v = sym.value(t + 1, s, mod64(r1 + beta * step, m), r2);
    } else {
      const int64_t m = ipow(p, s + 1);
      int64_t step = mulmod(mulmod(ipow(p, s) % m, powmod(ud.rho2 % m, s, m), m), powmod(ud.tau2 % m, t, m), m);
      v = sym.value(t, s + 1, r1, mod64(r2 + beta * step, m));
    }
    sx += v.x;
    sy += v.y;
  }
  return ElemK(sx, sy);
}

}  // namespace bianchi
