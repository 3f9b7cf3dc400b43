#include "bianchi/mellin.hpp"

namespace bianchi {

std::string CharSpec::label() const {
  return "t" + std::to_string(t) + "s" + std::to_string(s) + "j" + std::to_string(j1) + "_" + std::to_string(j2);
}

HeckeCharacter CharSpec::make(const BaseChangeSymbol& sym) const {
  const FieldK& K = *sym.context().K;
  if (t == 0 && s == 0) return HeckeCharacter::trivial(K);
  return HeckeCharacter::from_split(K, sym.split(t, s), j1, j2);
}

std::vector<CharSpec> primitive_characters(const BaseChangeSymbol& sym, int t, int s) {
  std::vector<CharSpec> out;
  const SplitLevel& lev = sym.split(t, s);
  for (auto [j1, j2] : lev.unit_trivial_characters())
    if (lev.conductor(j1, j2) == std::make_pair(t, s)) out.push_back({t, s, j1, j2});
  return out;
}

std::vector<CharSpec> verification_set(const BaseChangeSymbol& sym) {
  std::vector<CharSpec> out{{0, 0, 0, 0}};
  for (auto [t, s] : std::vector<std::pair<int, int>>{{2, 0}, {0, 2}, {1, 1}})
    for (auto& c : primitive_characters(sym, t, s)) out.push_back(c);
  return out;
}

namespace {

int diff_valuation(const PadicCyc& a, const PadicCyc& b) {
  PadicCyc d = a - b;
  return d.is_zero() ? d.absprec() : d.valuation();
}

}  // namespace

PadicLValue mellin_eval(const Lifter& lifter, const CharSpec& chr, const MellinOptions& opt) {
  const BaseChangeSymbol& sym = lifter.symbol();
  const BaseChange& bc = sym.context();
  const FieldK& K = *bc.K;
  const int64_t p = bc.emb->prime();
  const int N = lifter.options().N;
  PadicLValue out;
  out.chr = chr;
  out.q = opt.q;
  out.r = opt.r;
  out.level_t = std::max(chr.t, 1) + opt.extra_p;
  out.level_s = std::max(chr.s, 1) + opt.extra_pbar;
  if (out.level_t > opt.T || out.level_s > opt.T) throw MathError("mellin_eval: conductor exceeds the tree depth");
  if (opt.q >= lifter.M() || opt.r >= lifter.M()) throw MathError("mellin_eval: (q, r) beyond the moment bound");
  if (!K.is_unit(opt.unit_twist)) throw MathError("mellin_eval: twist is not a global unit");
  HeckeCharacter psi = chr.make(sym);
  AvatarCharacter av(psi, *bc.emb);
  const SplitLevel& lev = sym.split(out.level_t, out.level_s);
  const IntElem g = lifter.pi_power(out.level_t, out.level_s);
  const int64_t Q = lifter.modulus();
  const int M = lifter.M();
  const int64_t g1 = mod64(lifter.sigma1(g), Q), g2 = mod64(lifter.sigma2(g), Q);
  LiftStats stats;
  PadicCyc sum = PadicCyc::scalar(PadicNum::zero(p, N + 10));
  for (int64_t d1 = 0; d1 < lev.n1(); ++d1)
    for (int64_t d2 = 0; d2 < lev.n2(); ++d2) {
      IntElem b = lev.crt_lift(lev.exp1(d1), lev.exp2(d2));
      b = K.mul(opt.unit_twist, b);
      auto mom = lifter.node_moments({b, out.level_t, out.level_s}, opt.T, opt.T, &stats);
      // (mu|(1 b; 0 g))(x^q y^r) = mu((b + g x)^q (b + g y)^r)
      auto A = translation_matrix(mod64(lifter.sigma1(b), Q), g1, M, Q);
      auto B = translation_matrix(mod64(lifter.sigma2(b), Q), g2, M, Q);
      int64_t v = 0;
      for (int i = 0; i <= opt.q; ++i)
        for (int j = 0; j <= opt.r; ++j)
          v = mod64(v + mulmod(mulmod(A[(size_t)(opt.q * M + i)], B[(size_t)(opt.r * M + j)], Q),
                                mom[(size_t)(i * M + j)], Q),
                    Q);
      sum = sum + av.eval(b) * PadicNum::from_int(p, v, N);
    }
  PadicNum lam = bc.emb->embed(bc.lambda);
  out.value = sum * lam.inv().pow(out.level_t + out.level_s);
  int inv_loss = stats.min_leaf_valuation < 0 ? -stats.min_leaf_valuation : 0;
  int act_loss = std::min(N - 1, std::max(opt.q, opt.r));
  out.losses = {{"embedding", 0}, {"inversion", inv_loss}, {"weight_action", act_loss}};
  out.claimed_precision = N - inv_loss - act_loss;
  return out;
}

InterpRecord interpolation_check(const Lifter& lifter, const CharSpec& chr, int required, const MellinOptions& opt) {
  const BaseChangeSymbol& sym = lifter.symbol();
  const BaseChange& bc = sym.context();
  const FieldK& K = *bc.K;
  InterpRecord rec;
  rec.chr = chr;
  rec.lhs = mellin_eval(lifter, chr, opt);
  HeckeCharacter psi = chr.make(sym);
  const CycNum one = CycNum::from_int(1);
  rec.zfactor = one;
  for (const IdealK& Q : {bc.P, bc.Pb}) {
    CycNum v = psi.eval_ideal(Q);
    if (v.is_zero()) continue;  // q divides the conductor: factor 1
    rec.zfactor *= one - (bc.lambda * v).inv();
  }
  const int sign = (bc.k + opt.q + opt.r) % 2 ? -1 : 1;
  CycNum W = gauss_sum_W(psi);
  const CycNum& lo = sym.exact_data(chr.t, chr.s).lo.at({chr.j1, chr.j2});
  rec.rhs_exact =
      (rec.zfactor * W * bc.lambda.pow(-(chr.t + chr.s)) * lo * mpq_class(K.D() * K.w() * sign, 2)).minimized();
  rec.rhs = bc.emb->embed_formal(rec.rhs_exact);
  rec.valuation = diff_valuation(rec.lhs.value, rec.rhs);
  rec.pass = rec.valuation >= required;
  return rec;
}

std::vector<KatzRecord> katz_check(const Lifter& lifter, const std::vector<CharSpec>& set, int required,
                                   const MellinOptions& opt, const std::map<std::string, PadicLValue>* known) {
  const BaseChangeSymbol& sym = lifter.symbol();
  const BaseChange& bc = sym.context();
  const FieldK& K = *bc.K;
  set_working_digits(bc.digits);
  const IntElem delta = K.delta(), deltabar = K.conj(K.delta());
  const Complex period_ratio = bc.periods.omega_norm / bc.periods.active();
  struct Product {
    Complex value;
    double err = 0;
    CycNum gauss_lhs;
  };
  std::map<std::string, Product> products;
  auto product_of = [&](const CharSpec& c) -> const Product& {
    auto it = products.find(c.label());
    if (it != products.end()) return it->second;
    HeckeCharacter psi = c.make(sym);
    HeckeCharacter phic = bc.phi.conj();
    HeckeCharacter eta = phic.mul(psi).norm_twist(1);
    HeckeCharacter etap = phic.mul(psi.conj()).mul(bc.lambdaK).norm_twist(1);
    KatzValue k1 = katz_rhs(bc, eta, delta), k2 = katz_rhs(bc, etap, deltabar);
    Product pr;
    pr.value = k1.value.value * k2.value.value * period_ratio;
    pr.err = (Real(k1.value.err) * k2.value.value.abs() + Real(k2.value.err) * k1.value.value.abs()).convert_to<double>() *
             period_ratio.abs().convert_to<double>();
    pr.gauss_lhs = (k1.Wp * k2.Wp).minimized();
    return products.emplace(c.label(), pr).first->second;
  };
  std::vector<KatzRecord> out;
  for (auto& c : set) {
    KatzRecord rec;
    rec.chr = c;
    if (known && known->count(c.label()))
      rec.lhs = known->at(c.label());
    else
      rec.lhs = mellin_eval(lifter, c, opt);
    const Product& mine = product_of(c);
    HeckeCharacter psi = c.make(sym);
    CycNum gauss_rhs = (bc.lambda.pow(-(c.t + c.s)) * gauss_sum_W(psi)).minimized();
    rec.gauss_identity = mine.gauss_lhs == gauss_rhs;
    // recognize over the Galois orbit of the character
    CharOrbit orb;
    if (c.t == 0 && c.s == 0) {
      orb.exps = {0};
      orb.members = {{0, 0}};
    } else {
      orb = galois_orbit(sym.split(c.t, c.s), c.j1, c.j2);
    }
    std::vector<Complex> members;
    double err = 1e-40;
    size_t self = 0;
    for (size_t g = 0; g < orb.members.size(); ++g) {
      CharSpec m{c.t, c.s, orb.members[g].first, orb.members[g].second};
      const Product& pm = product_of(m);
      members.push_back(pm.value);
      err = std::max(err, pm.err);
      if (orb.members[g] == std::make_pair(c.j1, c.j2)) self = g;
    }
    OrbitSolve os = solve_galois_orbit(K, orb.r, orb.exps, members, sym.options().height, err);
    rec.margin = os.margin;
    rec.recognized = os.ok;
    if (!os.ok) {
      rec.reason = "recognition: " + os.reason;
      out.push_back(rec);
      continue;
    }
    rec.product = os.values[self];
    rec.rhs = bc.emb->embed_formal(rec.product);
    rec.valuation = diff_valuation(rec.lhs.value, rec.rhs);
    rec.pass = rec.gauss_identity && rec.valuation >= required;
    if (!rec.gauss_identity) rec.reason = "Gauss sum product identity fails";
    out.push_back(rec);
  }
  return out;
}

}  // namespace bianchi
