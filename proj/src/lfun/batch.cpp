#include <fftw3.h>

#include <cmath>

#include "bianchi/lfun.hpp"

namespace bianchi {

namespace mp = boost::multiprecision;

int64_t primitive_root_pk(int64_t p) {
  auto fac = factor_int(p - 1);
  for (int64_t g = 2; g < p; ++g) {
    bool prim = true;
    for (auto& [q, e] : fac)
      if (powmod(g, (p - 1) / q, p) == 1) prim = false;
    // primitive mod p^2 implies primitive mod every p^k
    if (prim && powmod(g, p - 1, p * p) != 1) return g;
  }
  throw MathError("primitive_root_pk: none found");
}

SplitLevel split_level(const BaseChange& bc, int a, int b) {
  const int64_t p = bc.emb->prime();
  const int e = std::max({a, b, 1});
  int64_t root = hensel_root(bc.K->omega_minpoly(), p, e, mod64(bc.emb->omega().residue(), p)).residue();
  return SplitLevel(*bc.K, p, root, a, b, primitive_root_pk(p));
}

BaseChange make_base_change(const FieldK& K, const PadicEmbedding& emb, int digits, bool use_norm_period,
                            IntElem unit_p, IntElem unit_pbar) {
  if (!K.is_unit(unit_p) || !K.is_unit(unit_pbar)) throw MathError("make_base_change: uniformizer rescaling must be a unit");
  set_working_digits(digits);
  BaseChange bc;
  bc.K = &K;
  bc.emb = &emb;
  bc.digits = digits;
  bc.phi = HeckeCharacter::canonical_phi_Qi(K);
  bc.lambdaK = HeckeCharacter::lambda_K(K);
  auto [P, Pb] = split_primes(K, emb);
  bc.P = P;
  bc.Pb = Pb;
  bc.pi_p = K.mul(unit_p, uniformizer(K, P));
  bc.pi_pbar = K.mul(unit_pbar, uniformizer(K, Pb));
  bc.lambda = bc.phi.eval_ideal(Pb);
  bc.beta = bc.phi.eval_ideal(P);
  bc.k = -bc.phi.type().a - 1;
  bc.periods = cm_periods(K, -1, 0, bc.k);
  bc.periods.use_norm = use_norm_period;
  return bc;
}

Complex stabilization_factor(const BaseChange& bc, const HeckeCharacter& psi) {
  Complex beta = to_mp(bc.beta);
  Complex e(Real(1));
  for (const IdealK* q : {&bc.P, &bc.Pb}) {
    CycNum v = psi.eval_ideal(*q);
    if (v.is_zero()) continue;
    e = e * (Complex(Real(1)) - beta * to_mp(v) / Real(q->norm()));
  }
  return e;
}

LambdaValue completed_lambda(const BaseChange& bc, const HeckeCharacter& psi) {
  set_working_digits(bc.digits);
  HeckeCharacter pc = bc.phi.conj();
  LambdaValue out;
  out.L1 = hecke_lvalue(pc.mul(psi), 1.0, bc.digits);
  out.L2 = hecke_lvalue(pc.mul(psi.conj()).mul(bc.lambdaK), 1.0, bc.digits);
  InfinityType t = psi.type();
  // Gamma(q+1) Gamma(r+1) / (2 pi i)^{q+r+2}
  Complex twopii(Real(0), 2 * pi_mp());
  out.gamma_factor = Complex(mp::tgamma(Real(t.a + 1)) * mp::tgamma(Real(t.b + 1))) / cpow_int(twopii, t.a + t.b + 2);
  out.euler = stabilization_factor(bc, psi);
  out.lambda = out.gamma_factor * out.L1.value * out.L2.value;
  out.lambda_stab = out.lambda * out.euler;
  out.ratio = out.lambda_stab / bc.periods.active();
  return out;
}

namespace {

// per-ideal data shared by both batch paths: odd-norm generators with the phi^c part
struct IdealClass {
  int64_t norm;
  int64_t cls1, cls2;  // dlog class of alpha and of conj(alpha), -1 if not a unit
  IntElem alpha;
};

std::vector<IdealClass> classify(const BaseChange& bc, const SplitLevel& lev, int64_t cutoff) {
  const FieldK& K = *bc.K;
  std::vector<IdealClass> out;
  for (auto& [alpha, N] : ideals_up_to(K, cutoff)) {
    if (!bc.phi.coprime(alpha)) continue;
    auto cls = [&](const IntElem& x) -> int64_t {
      int64_t d1 = lev.dlog1(lev.res1(x)), d2 = lev.dlog2(lev.res2(x));
      if (d1 < 0 || d2 < 0) return -1;
      return d1 * lev.n2() + d2;
    };
    out.push_back({N, cls(alpha), cls(K.conj(alpha)), alpha});
  }
  return out;
}

// phi^c((alpha)) / sqrt(N) = phi((conj alpha)) / |alpha|
Complex base_coeff(const BaseChange& bc, const IntElem& alpha, int64_t N) {
  const FieldK& K = *bc.K;
  IntElem ab = K.conj(alpha);
  Complex v = root_of_unity_mp(bc.phi.order(), bc.phi.eps_exp(ab));
  InfinityType t = bc.phi.type();
  Complex z = to_mp(K, ab);
  if (t.a < 0) v = v * cpow_int(z, -t.a);
  if (t.b < 0) v = v * cpow_int(z.conj(), -t.b);
  return v / mp::pow(Real(N), Real(-(t.a + t.b)) / 2);
}

std::complex<double> base_coeff_d(const BaseChange& bc, const IntElem& alpha, int64_t N) {
  const FieldK& K = *bc.K;
  IntElem ab = K.conj(alpha);
  std::complex<double> v = std::polar(1.0, 2 * M_PI * (double)bc.phi.eps_exp(ab) / (double)bc.phi.order());
  InfinityType t = bc.phi.type();
  std::complex<double> z = K.to_complex(ab);
  if (t.a < 0) v *= std::pow(z, -t.a);
  if (t.b < 0) v *= std::pow(std::conj(z), -t.b);
  return v / std::pow((double)N, -(t.a + t.b) / 2.0);
}

double level_Q(const BaseChange& bc, int a, int b) {
  return (double)bc.K->D() * (double)bc.phi.modulus().norm() * std::pow((double)bc.emb->prime(), a + b);
}

void check_phi_type(const BaseChange& bc) {
  InfinityType t = bc.phi.type();
  if (t.a + t.b != -1 || std::abs(t.a - t.b) != 1)
    throw MathError("level batch: only the weight-2 case (phi of type (-1,0) or (0,-1)) is batched");
}

}  // namespace

std::map<std::pair<int64_t, int64_t>, Complex> level_ratios(const BaseChange& bc, int a, int b) {
  check_phi_type(bc);
  set_working_digits(bc.digits);
  SplitLevel lev = split_level(bc, a, b);
  const int64_t n1 = lev.n1(), n2 = lev.n2(), G = n1 * n2;
  AfeOptions opt;
  opt.digits = bc.digits;
  const double Q = level_Q(bc, a, b);
  const int64_t cutoff = afe_cutoff(Q, opt.digits, opt.u2);
  // unitary s = 1/2 and kappa = 1/2 for both factors
  AfeWeights w = afe_weights(Q, Real(0.5), Real(0.5), opt, cutoff);
  // bins[L][j][direct/dual][class]
  std::vector<Complex> bins[2][3][2];
  for (auto& L : bins)
    for (auto& j : L)
      for (auto& v : j) v.assign((size_t)G, Complex());
  for (auto& ic : classify(bc, lev, cutoff)) {
    Complex c = base_coeff(bc, ic.alpha, ic.norm), cc = c.conj();
    const int64_t cls[2] = {ic.cls1, ic.cls2};
    for (int L = 0; L < 2; ++L) {
      if (cls[L] < 0) continue;
      for (int j = 0; j < 3; ++j) {
        bins[L][j][0][(size_t)cls[L]] += c * w.direct[j][(size_t)ic.norm];
        bins[L][j][1][(size_t)cls[L]] += cc * w.dual[j][(size_t)ic.norm];
      }
    }
  }
  std::vector<Complex> roots((size_t)G);
  for (int64_t e = 0; e < G; ++e) roots[(size_t)e] = root_of_unity_mp(G, e);
  Real norm_gam = mp::sqrt(w.A);  // A^s Gamma(s + kappa) at s = 1/2, Gamma(1) = 1
  Complex twopii(Real(0), 2 * pi_mp());
  Complex gam = Complex(Real(1)) / cpow_int(twopii, 2);
  std::map<std::pair<int64_t, int64_t>, Complex> out;
  for (auto [j1, j2] : lev.unit_trivial_characters()) {
    if (lev.conductor(j1, j2) != std::make_pair(a, b)) continue;
    Complex Lval[2];
    for (int L = 0; L < 2; ++L) {
      AfeSums sums;
      for (int64_t d1 = 0; d1 < n1; ++d1)
        for (int64_t d2 = 0; d2 < n2; ++d2) {
          const size_t cls = (size_t)(d1 * n2 + d2);
          // ep(class) = chi^{-1}
          int64_t e = mod64(-(mod64(j1 * d1, n1) * n2 + mod64(j2 * d2, n2) * n1), G);
          const Complex& r = roots[(size_t)e];
          const Complex& rc = roots[(size_t)mod64(-e, G)];
          for (int j = 0; j < 3; ++j) {
            if (bins[L][j][0][cls].re != 0 || bins[L][j][0][cls].im != 0) sums.direct[j] += r * bins[L][j][0][cls];
            if (bins[L][j][1][cls].re != 0 || bins[L][j][1][cls].im != 0) sums.dual[j] += rc * bins[L][j][1][cls];
          }
        }
      Lval[L] = afe_solve(w, sums).lambda / norm_gam;
    }
    // Euler factors at primes above p not dividing the conductor
    Complex eul(Real(1));
    if (a == 0 || b == 0) {
      HeckeCharacter psi = HeckeCharacter::from_split(*bc.K, lev, j1, j2);
      eul = stabilization_factor(bc, psi);
    }
    out[{j1, j2}] = gam * eul * Lval[0] * Lval[1] / bc.periods.active();
  }
  return out;
}

std::vector<std::complex<double>> deep_gauss_sums(const BaseChange& bc, const SplitLevel& lev) {
  const FieldK& K = *bc.K;
  const int64_t n1 = lev.n1(), n2 = lev.n2();
  IdealK P = lev.prime_p();
  IdealK f = ideal_mul(K, ideal_pow(K, P, lev.a()), ideal_pow(K, ideal_conj(K, P), lev.b()));
  IntElem gamma = f.generator(K);
  const int64_t N = f.norm();
  // the additive character d -> e(Tr(d conj(gamma))/(delta N)) splits as e(A r1/p^a) e(B r2/p^b)
  auto Lfun = [&](const IntElem& d) { return mod64(K.trace_over_delta(K.mul(d, K.conj(gamma))), N); };
  int64_t A = 0, B = 0;
  if (lev.a()) A = Lfun(lev.crt_lift(1, 0)) / (N / lev.mod1());
  if (lev.b()) B = Lfun(lev.crt_lift(0, 1)) / (N / lev.mod2());
  auto local = [&](int e, int64_t n, int64_t mod, int64_t coef, auto expo) {
    std::vector<std::complex<double>> out((size_t)n, 1.0);
    if (!e) return out;
    std::vector<std::complex<double>> in((size_t)n);
    for (int64_t k = 0; k < n; ++k) in[(size_t)k] = std::polar(1.0, 2 * M_PI * (double)mulmod(coef, expo(k), mod) / (double)mod);
    // out[j] = Sum_k e^{2 pi i j k/n} in[k]
    fftw_complex* buf = fftw_alloc_complex((size_t)n);
    fftw_plan plan = fftw_plan_dft_1d((int)n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    for (int64_t k = 0; k < n; ++k) {
      buf[k][0] = in[(size_t)k].real();
      buf[k][1] = in[(size_t)k].imag();
    }
    fftw_execute(plan);
    for (int64_t j = 0; j < n; ++j) out[(size_t)j] = {buf[j][0], buf[j][1]};
    fftw_destroy_plan(plan);
    fftw_free(buf);
    return out;
  };
  auto g1 = local(lev.a(), n1, lev.mod1(), A, [&](int64_t k) { return lev.exp1(k); });
  auto g2 = local(lev.b(), n2, lev.mod2(), B, [&](int64_t k) { return lev.exp2(k); });
  std::vector<std::complex<double>> W((size_t)(n1 * n2));
  for (int64_t j1 = 0; j1 < n1; ++j1)
    for (int64_t j2 = 0; j2 < n2; ++j2) W[(size_t)(j1 * n2 + j2)] = g1[(size_t)j1] * g2[(size_t)j2];
  return W;
}

DeepLevel deep_level_ratios(const BaseChange& bc, int a, int b) {
  check_phi_type(bc);
  SplitLevel lev = split_level(bc, a, b);
  const int64_t n1 = lev.n1(), n2 = lev.n2(), G = n1 * n2;
  DeepLevel out;
  out.a = a;
  out.b = b;
  out.n1 = n1;
  out.n2 = n2;
  out.primitive.assign((size_t)G, 0);
  out.ratio.assign((size_t)G, 0.0);
  for (auto [j1, j2] : lev.unit_trivial_characters())
    if (lev.conductor(j1, j2) == std::make_pair(a, b)) out.primitive[(size_t)(j1 * n2 + j2)] = 1;

  const int digits = 16;
  const double u[3] = {1.0, 1.25, 1.1};
  const double Q = level_Q(bc, a, b);
  const double Aq = std::sqrt(Q) / (2 * M_PI);
  const int64_t cutoff = afe_cutoff(Q, digits, u[1]);
  auto ideals = classify(bc, lev, cutoff);
  std::vector<std::complex<double>> base(ideals.size());
  for (size_t i = 0; i < ideals.size(); ++i) base[i] = base_coeff_d(bc, ideals[i].alpha, ideals[i].norm);

  fftw_complex* buf = fftw_alloc_complex((size_t)G);
  fftw_plan fwd = fftw_plan_dft_2d((int)n1, (int)n2, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  fftw_plan bwd = fftw_plan_dft_2d((int)n1, (int)n2, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  auto run = [&](fftw_plan plan, int L, bool dual, double uu, std::vector<std::complex<double>>& dst) {
    std::fill((double*)buf, (double*)buf + 2 * G, 0.0);
    for (size_t i = 0; i < ideals.size(); ++i) {
      int64_t cls = L == 0 ? ideals[i].cls1 : ideals[i].cls2;
      if (cls < 0) continue;
      const double m = (double)ideals[i].norm;
      std::complex<double> c = dual ? std::conj(base[i]) * (std::sqrt(Aq / m) * std::exp(-m / (uu * Aq)))
                                    : base[i] * (std::sqrt(Aq / m) * std::exp(-m * uu / Aq));
      buf[cls][0] += c.real();
      buf[cls][1] += c.imag();
    }
    fftw_execute(plan);
    dst.resize((size_t)G);
    for (int64_t k = 0; k < G; ++k) dst[(size_t)k] = {buf[k][0], buf[k][1]};
  };
  std::vector<std::complex<double>> Lval[2];
  for (int L = 0; L < 2; ++L) {
    std::vector<std::complex<double>> S[3], T[3];
    for (int j = 0; j < 3; ++j) {
      run(fwd, L, false, u[j], S[j]);  // Sum ep(class) bin, ep = e^{-2 pi i (j.d)}
      run(bwd, L, true, u[j], T[j]);
    }
    Lval[L].assign((size_t)G, 0.0);
    for (int64_t k = 0; k < G; ++k) {
      if (!out.primitive[(size_t)k]) continue;
      std::complex<double> W = (S[0][k] - S[1][k]) / (T[1][k] - T[0][k]);
      std::complex<double> lam = S[0][k] + W * T[0][k];
      std::complex<double> lam3 = S[2][k] + W * T[2][k];
      out.max_consistency = std::max(out.max_consistency, std::abs(lam3 - lam));
      Lval[L][(size_t)k] = lam / std::sqrt(Aq);
    }
  }
  fftw_destroy_plan(fwd);
  fftw_destroy_plan(bwd);
  fftw_free(buf);

  const std::complex<double> gam = -1.0 / (4 * M_PI * M_PI);
  const std::complex<double> omega = bc.periods.active().to_cd();
  const std::complex<double> beta = bc.beta.to_complex();
  const double p = (double)lev.p();
  for (int64_t j1 = 0; j1 < n1; ++j1)
    for (int64_t j2 = 0; j2 < n2; ++j2) {
      const size_t k = (size_t)(j1 * n2 + j2);
      if (!out.primitive[k]) continue;
      std::complex<double> eul = 1.0;
      // psi((pi_q)) = ep(pi_q) = chi(pi_q)^{-1} for the prime missing from the conductor
      if (a == 0) {
        IntElem pi = bc.P.generator(*bc.K);
        double ph = 2 * M_PI * ((double)mod64(j2 * lev.dlog2(lev.res2(pi)), n2) / (double)n2);
        eul *= 1.0 - beta * std::polar(1.0, -ph) / p;
      }
      if (b == 0) {
        IntElem pi = bc.Pb.generator(*bc.K);
        double ph = 2 * M_PI * ((double)mod64(j1 * lev.dlog1(lev.res1(pi)), n1) / (double)n1);
        eul *= 1.0 - beta * std::polar(1.0, -ph) / p;
      }
      out.ratio[k] = gam * eul * Lval[0][k] * Lval[1][k] / omega;
    }
  out.gauss = deep_gauss_sums(bc, lev);
  return out;
}

}  // namespace bianchi
