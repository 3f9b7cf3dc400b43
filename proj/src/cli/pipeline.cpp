#include <algorithm>
#include <cmath>
#include <sstream>

#include "bianchi/cli.hpp"

namespace bianchi {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string real_str(const Real& x, int digits) { return x.str(digits, std::ios_base::scientific); }

std::string fmt_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

// Q(i) element from a CycNum of conductor dividing 4 (omega = i)
ElemK gaussian_of(const CycNum& x) {
  CycNum y = x.minimized();
  if (y.conductor() == 1) return ElemK(y.coeffs()[0], 0);
  if (y.conductor() != 4) throw MathError("expected an element of Q(i)");
  return ElemK(y.coeffs()[0], y.coeffs()[1]);
}

std::string elem_json_str(const FieldK& K, const IntElem& a) { return K.str(a); }

}  // namespace

Pipeline::Pipeline(PipelineConfig cfg, LogSink log)
    : cfg_(std::move(cfg)), log_(std::move(log)), cache_(cfg_.cache_dir, log_) {
  validate_config(cfg_);
}

Pipeline::~Pipeline() = default;

void Pipeline::log(const std::string& line) const {
  if (log_) log_(line);
}

template <class F>
auto Pipeline::timed(const std::string& stage, F&& f) -> decltype(f()) {
  auto t0 = std::chrono::steady_clock::now();
  struct Charge {
    std::map<std::string, double>& t;
    const std::string& s;
    std::chrono::steady_clock::time_point t0;
    ~Charge() { t[s] += seconds_since(t0); }
  } charge{timings_, stage, t0};
  return f();
}

const FieldK& Pipeline::field() {
  if (!K_) K_ = std::make_unique<FieldK>(cfg_.D);
  return *K_;
}

const PadicEmbedding& Pipeline::embedding() {
  if (!emb_) {
    const FieldK& K = field();
    emb_ = std::make_unique<PadicEmbedding>(cfg_.p, std::max(8, cfg_.N + 4), K.omega_minpoly(), cfg_.seed, &K.omega_cyc());
  }
  return *emb_;
}

const BaseChange& Pipeline::base_change() {
  if (!bc_) {
    const FieldK& K = field();
    const PadicEmbedding& emb = embedding();
    bc_ = std::make_unique<BaseChange>(timed("field", [&] {
      return make_base_change(K, emb, cfg_.digits, cfg_.omega_normalization == "norm", cfg_.unit_p, cfg_.unit_pbar);
    }));
    log("stage=field event=base_change lambda=" + bc_->lambda.str() + " pi_p=" + K.str(bc_->pi_p) +
        " pi_pbar=" + K.str(bc_->pi_pbar));
  }
  return *bc_;
}

BaseChangeSymbol& Pipeline::symbol(int A, int B) {
  if (!sym_) {
    const BaseChange& bc = base_change();
    SymbolOptions opt;
    if (cache_.enabled()) {
      const std::string prefix = "recognized/v1/" + cfg_.convention_key() + "/level=";
      opt.load_level = [this, prefix](int a, int b) -> std::optional<RecognizedLevel> {
        auto v = cache_.get(prefix + std::to_string(a) + "," + std::to_string(b));
        if (!v) return std::nullopt;
        try {
          RecognizedLevel r;
          std::stringstream in(*v);
          std::string item;
          bool first = true;
          while (std::getline(in, item, '|')) {
            if (first) {
              r.min_margin = std::stod(item);
              first = false;
              continue;
            }
            auto eq = item.find('=');
            auto comma = item.find(',');
            if (eq == std::string::npos || comma == std::string::npos || comma > eq) throw MathError("bad entry");
            r.lo[{std::stoll(item.substr(0, comma)), std::stoll(item.substr(comma + 1, eq - comma - 1))}] =
                cyc_parse(item.substr(eq + 1));
          }
          log("stage=symbol event=cache_hit level=" + std::to_string(a) + "," + std::to_string(b));
          return r;
        } catch (const std::exception& e) {
          log("stage=cache event=unparsable_entry level=" + std::to_string(a) + "," + std::to_string(b) +
              " action=recompute");
          return std::nullopt;
        }
      };
      opt.store_level = [this, prefix](int a, int b, const RecognizedLevel& r) {
        std::string v = fmt_double(r.min_margin);
        for (auto& [j, lo] : r.lo) v += "|" + std::to_string(j.first) + "," + std::to_string(j.second) + "=" + cyc_serialize(lo);
        cache_.put(prefix + std::to_string(a) + "," + std::to_string(b), v);
      };
    }
    sym_ = std::make_unique<BaseChangeSymbol>(bc, opt);
  }
  if (A >= 0 && B >= 0 && !sym_->has_level(A, B)) {
    timed("symbol", [&] { sym_->ensure_levels(A, B); });
    log("stage=symbol event=levels_ready max=" + std::to_string(A) + "," + std::to_string(B) +
        " exact=" + std::to_string(sym_->exact_levels()) + " deep=" + std::to_string(sym_->deep_levels()));
  }
  return *sym_;
}

Lifter& Pipeline::lifter() {
  if (!lifter_) {
    BaseChangeSymbol& sym = symbol(cfg_.T, cfg_.T);
    LiftOptions lo;
    lo.N = cfg_.N;
    lo.M = cfg_.moment_bound();
    lifter_ = std::make_unique<Lifter>(sym, lo);
  }
  return *lifter_;
}

ComplexVal Pipeline::lvalue(const HeckeCharacter& chi, double s0) {
  std::ostringstream key;
  key << "L/v1/" << chi.fingerprint() << "/s0=" << s0 << "/digits=" << cfg_.digits;
  auto parse = [&](const std::string& v) {
    std::stringstream in(v);
    std::string re, im, err;
    std::getline(in, re, ';');
    std::getline(in, im, ';');
    std::getline(in, err, ';');
    ComplexVal out;
    out.value = Complex(Real(re), Real(im));
    out.err = std::stod(err);
    return out;
  };
  set_working_digits(cfg_.digits);
  if (auto hit = cache_.get(key.str())) {
    try {
      return parse(*hit);
    } catch (const std::exception&) {
      log("stage=cache event=unparsable_entry key=" + key.str() + " action=recompute");
    }
  }
  ComplexVal v = timed("lvalue", [&] { return hecke_lvalue(chi, s0, cfg_.digits); });
  // round trip through the stored text so cold and warm runs see the same digits
  std::string text = real_str(v.value.re, cfg_.digits + 5) + ";" + real_str(v.value.im, cfg_.digits + 5) + ";" +
                     fmt_double(v.err);
  cache_.put(key.str(), text);
  return parse(text);
}

std::vector<CharSpec> Pipeline::character_set() {
  BaseChangeSymbol& sym = symbol(-1, -1);
  std::vector<CharSpec> out{{0, 0, 0, 0}};
  for (int total = 1; total <= cfg_.max_t + cfg_.max_s; ++total)
    for (int t = std::min(total, cfg_.max_t); t >= 0; --t) {
      int s = total - t;
      if (s > cfg_.max_s || t + s > 2) continue;
      for (auto& c : primitive_characters(sym, t, s)) out.push_back(c);
    }
  return out;
}

Json Pipeline::field_info(bool& ok) {
  const FieldK& K = field();
  const BaseChange& bc = base_change();
  const PadicEmbedding& emb = embedding();
  Json j;
  j["D"] = K.D();
  j["class_number"] = K.h();
  j["units"] = K.w();
  PrimeSplit ps = factor_prime(K, cfg_.p);
  const char* kind = ps.kind == Splitting::Split ? "split" : ps.kind == Splitting::Inert ? "inert" : "ramified";
  j["p"] = cfg_.p;
  j["p_splitting"] = kind;
  j["prime_p"] = K.str(bc.P.generator(K));
  j["prime_pbar"] = K.str(bc.Pb.generator(K));
  j["pi_p"] = elem_json_str(K, bc.pi_p);
  j["pi_pbar"] = elem_json_str(K, bc.pi_pbar);
  j["phi_conductor_norm"] = bc.phi.modulus().norm();
  j["phi_p"] = cyc_json(bc.beta);
  j["phi_pbar"] = cyc_json(bc.lambda);
  CycNum ap = bc.beta + bc.lambda;
  j["a_p"] = ap.is_rational() ? ap.rational_part().get_str() : ap.str();
  int v_lam = emb.embed(bc.lambda).valuation(), v_beta = emb.embed(bc.beta).valuation();
  j["v_phi_pbar"] = v_lam;
  j["v_phi_p"] = v_beta;
  bool ordinary = v_lam == 0 && v_beta == cfg_.k + 1;
  j["ordinary"] = ordinary;
  ok = K.h() == 1 && ps.kind == Splitting::Split && ordinary;
  log("stage=field-info event=done h=" + std::to_string(K.h()) + " w=" + std::to_string(K.w()) + " p_split=" +
      kind + " ordinary=" + (ordinary ? "1" : "0"));
  return j;
}

Json Pipeline::char_table(bool& ok) {
  BaseChangeSymbol& sym = symbol(-1, -1);
  ok = true;
  Json rows = Json::array();
  timed("char-table", [&] {
    for (auto& c : character_set()) {
      HeckeCharacter psi = c.make(sym);
      CycNum W = gauss_sum_W(psi);
      bool norm_ok = (W * W.conj()).minimized() == CycNum::from_int(psi.conductor().norm());
      Json r;
      r["label"] = c.label();
      r["conductor_exponents"] = {c.t, c.s};
      r["order"] = psi.order();
      r["conductor_norm"] = psi.conductor().norm();
      r["unit_compatible"] = psi.unit_compatible();
      r["gauss_sum"] = cyc_json(W);
      r["abs_gauss_squared_is_norm"] = norm_ok;
      ok = ok && norm_ok && psi.unit_compatible();
      rows.push_back(r);
    }
  });
  log("stage=char-table event=done characters=" + std::to_string(rows.size()));
  return Json{{"characters", rows}};
}

Json Pipeline::lvalue_stage(bool& ok) {
  const BaseChange& bc = base_change();
  BaseChangeSymbol& sym = symbol(-1, -1);
  const HeckeCharacter phic = bc.phi.conj();
  ok = true;
  Json rows = Json::array();
  const Real tol("1e-20");
  for (auto& c : character_set()) {
    HeckeCharacter psi = c.make(sym);
    ComplexVal L1 = lvalue(phic.mul(psi), 1.0);
    ComplexVal L2 = lvalue(phic.mul(psi.conj()).mul(bc.lambdaK), 1.0);
    ComplexVal A1 = lvalue(phic.mul(psi).mul(bc.lambdaK), 1.0);
    ComplexVal A2 = lvalue(phic.mul(psi.conj()), 1.0);
    Complex prim = L1.value * L2.value, alt = A1.value * A2.value;
    Real diff = (prim - alt).abs();
    bool pass = diff < tol;
    ok = ok && pass;
    Json r;
    r["label"] = c.label();
    r["L_phic_psi"] = L1.value.str(25);
    r["L_phic_psic_lambdaK"] = L2.value.str(25);
    r["product"] = prim.str(25);
    r["alternate_product"] = alt.str(25);
    r["difference"] = real_str(diff, 3);
    r["error_bound"] = fmt_double(L1.err + L2.err + A1.err + A2.err);
    r["pass"] = pass;
    rows.push_back(r);
    log("stage=lvalue event=character label=" + c.label() + " diff=" + real_str(diff, 3) + " pass=" + (pass ? "1" : "0"));
  }
  return Json{{"tolerance", "1e-20"}, {"records", rows}};
}

Json Pipeline::symbol_stage(bool& ok) {
  const int T = cfg_.T;
  BaseChangeSymbol& sym = symbol(T, T);
  const BaseChange& bc = base_change();
  const FieldK& K = field();
  ok = true;
  Json levels = Json::array();
  std::string canon_lo, canon_vals;
  const ElemK lam = gaussian_of(bc.lambda);
  timed("symbol-checks", [&] {
    for (int a = 0; a <= T; ++a)
      for (int b = 0; b <= T; ++b) {
        const SymbolLevel& L = sym.level(a, b);
        Json r;
        r["level"] = {a, b};
        r["kind"] = L.exact ? "exact" : "deep";
        r["classes"] = L.n1 * L.n2;
        if (L.exact) {
          const ExactLevelData& ed = sym.exact_data(a, b);
          RoundTrip rt = sym.round_trip(a, b);
          r["primitive_characters"] = ed.lo.size();
          r["recognition_margin"] = ed.lo.empty() ? Json() : Json(fmt_double(ed.min_margin));
          r["round_trip_checked"] = rt.checked;
          r["round_trip_failures"] = rt.failures.size();
          ok = ok && rt.ok();
          for (auto& [j, lo] : ed.lo)
            canon_lo += std::to_string(a) + "," + std::to_string(b) + ":" + std::to_string(j.first) + "," +
                        std::to_string(j.second) + "=" + cyc_serialize(lo) + ";";
          for (auto& v : L.num) canon_vals += std::to_string(v.x) + "," + std::to_string(v.y) + ";";
        } else {
          r["rounding_residual"] = fmt_double(L.max_round_residual);
        }
        // eigen equations wherever both children levels exist
        if (a < T && b < T) {
          int64_t m1 = ipow(cfg_.p, a), m2 = ipow(cfg_.p, b);
          int64_t step1 = m1 > 25 ? 7 : 1, step2 = m2 > 25 ? 11 : 1;
          int n = 0, bad = 0;
          for (int64_t r1 = 0; r1 < m1; r1 += step1)
            for (int64_t r2 = 0; r2 < m2; r2 += step2) {
              ElemK rhs = elem_mul(K, lam, sym.value(a, b, r1, r2));
              ++n;
              if (!(hecke_U_value(sym, true, a, b, r1, r2) == rhs)) ++bad;
              if (!(hecke_U_value(sym, false, a, b, r1, r2) == rhs)) ++bad;
            }
          r["eigen_checked"] = n;
          r["eigen_failures"] = bad;
          ok = ok && bad == 0;
        }
        levels.push_back(r);
      }
  });
  IntElem c0 = sym.value_num(0, 0, 0, 0);
  Json j;
  j["denominator"] = sym.options().denominator;
  j["value_at_zero"] = {{"numerator", K.str(c0)}, {"denominator", sym.options().denominator}};
  j["levels"] = levels;
  j["max_rounding_residual"] = fmt_double(sym.max_round_residual());
  j["hashes"] = {{"recognized_constants", regression_hash(canon_lo)}, {"exact_symbol_values", regression_hash(canon_vals)}};
  log("stage=symbol event=done exact=" + std::to_string(sym.exact_levels()) + " deep=" +
      std::to_string(sym.deep_levels()) + " pass=" + (ok ? "1" : "0"));
  return j;
}

Json Pipeline::lift_stage(bool& ok) {
  const int T = cfg_.T;
  Lifter& L = lifter();
  LiftStats stats;
  FinDist root = timed("lift", [&] { return L.eigen_lift(T, T, &stats); });
  Json j;
  Json mom = Json::array();
  std::string canon;
  for (int a = 0; a < root.M; ++a) {
    Json row = Json::array();
    for (int b = 0; b < root.M; ++b) {
      int64_t v = root.at(a, b).is_zero() ? 0 : root.at(a, b).residue();
      row.push_back(v);
      canon += std::to_string(v) + ",";
    }
    mom.push_back(row);
  }
  j["depth"] = T;
  j["modulus"] = L.modulus();
  j["root_moments"] = mom;
  j["leaves"] = stats.leaves;
  j["nonintegral_leaves"] = stats.nonintegral_leaves;
  j["min_leaf_valuation"] = stats.min_leaf_valuation;
  j["cusp_checks"] = stats.cusp_checks;
  j["cusp_failures"] = stats.cusp_failures;
  bool integral = stats.nonintegral_leaves == 0 && root.min_valuation() >= 0;
  j["integral"] = integral;
  // uniqueness under random higher moments
  bool unique = timed("lift", [&] {
    bool same = true;
    FinDist prev;
    for (uint64_t trial = 1; trial <= 2; ++trial) {
      LiftOptions o = L.options();
      o.randomize = true;
      o.trial = trial;
      Lifter R(L.symbol(), o);
      FinDist v = R.eigen_lift(T, T);
      same = same && v.agrees(root) && (trial == 1 || v.agrees(prev));
      prev = v;
    }
    return same;
  });
  j["random_lifts_agree"] = unique;
  // one more sweep of each operator
  symbol(T + 1, T);
  symbol(T, T + 1);
  bool eigen = timed("lift", [&] {
    return L.eigen_lift(T + 1, T).agrees(root) && L.eigen_lift(T, T + 1).agrees(root);
  });
  j["extra_sweeps_agree"] = eigen;
  auto conv = timed("lift", [&] { return convergence_log(L, T, log_); });
  Json cj = Json::array();
  for (auto& st : conv) cj.push_back({{"t", st.t}, {"agreeing", st.agreeing}, {"total", st.total}});
  j["convergence"] = cj;
  j["hashes"] = {{"root_moments", regression_hash(canon)}};
  ok = integral && unique && eigen && stats.cusp_failures == 0;
  log("stage=lift event=done leaves=" + std::to_string(stats.leaves) + " integral=" + (integral ? "1" : "0") +
      " unique=" + (unique ? "1" : "0") + " eigen=" + (eigen ? "1" : "0"));
  return j;
}

Json Pipeline::padic_l(bool& ok) {
  Lifter& L = lifter();
  ok = true;
  Json rows = Json::array();
  for (auto& c : character_set())
    for (int q = 0; q <= cfg_.q_max; ++q)
      for (int r = 0; r <= cfg_.r_max; ++r) {
        MellinOptions o;
        o.T = cfg_.T;
        o.q = q;
        o.r = r;
        PadicLValue v = timed("padic-l", [&] { return mellin_eval(L, c, o); });
        if (q == 0 && r == 0) mellin_[c.label()] = v;
        ok = ok && v.claimed_precision >= cfg_.required();
        rows.push_back(lvalue_json(v));
        log("stage=padic-l event=character label=" + c.label() + " q=" + std::to_string(q) + " r=" +
            std::to_string(r) + " claimed_precision=" + std::to_string(v.claimed_precision));
      }
  return Json{{"records", rows}};
}

const std::vector<InterpRecord>& Pipeline::interpolation_records() {
  if (interp_.empty()) {
    Lifter& L = lifter();
    for (auto& c : character_set())
      for (int q = 0; q <= cfg_.q_max; ++q)
        for (int r = 0; r <= cfg_.r_max; ++r) {
          MellinOptions o;
          o.T = cfg_.T;
          o.q = q;
          o.r = r;
          InterpRecord rec = timed("verify-interp", [&] { return interpolation_check(L, c, cfg_.required(), o); });
          if (q == 0 && r == 0) mellin_[c.label()] = rec.lhs;
          log("stage=verify-interp event=character label=" + c.label() + " valuation=" +
              std::to_string(rec.valuation) + " pass=" + (rec.pass ? "1" : "0"));
          interp_.push_back(std::move(rec));
        }
  }
  return interp_;
}

Json Pipeline::verify_interp(bool& ok) {
  ok = true;
  Json rows = Json::array();
  std::string canon;
  for (auto& r : interpolation_records()) {
    ok = ok && r.pass;
    rows.push_back(interp_json(r));
    canon += r.chr.label() + "=" + cyc_serialize(r.rhs_exact.minimized()) + ";";
  }
  return Json{{"required_valuation", cfg_.required()}, {"records", rows}, {"hashes", {{"rhs_exact", regression_hash(canon)}}}};
}

Json Pipeline::verify_katz(bool& ok) {
  Lifter& L = lifter();
  interpolation_records();  // fills the Mellin values
  ok = true;
  MellinOptions o;
  o.T = cfg_.T;
  auto recs = timed("verify-katz", [&] { return katz_check(L, character_set(), cfg_.required(), o, &mellin_); });
  Json rows = Json::array();
  std::string canon;
  for (auto& r : recs) {
    ok = ok && r.pass;
    rows.push_back(katz_json(r));
    if (r.recognized) canon += r.chr.label() + "=" + cyc_serialize(r.product.minimized()) + ";";
    log("stage=verify-katz event=character label=" + r.chr.label() + " valuation=" + std::to_string(r.valuation) +
        " gauss_identity=" + (r.gauss_identity ? "1" : "0") + " pass=" + (r.pass ? "1" : "0"));
  }
  return Json{{"required_valuation", cfg_.required()}, {"records", rows}, {"hashes", {{"katz_products", regression_hash(canon)}}}};
}

Json Pipeline::verify_all(bool& ok) {
  Json j;
  ok = true;
  auto stage = [&](const char* name, Json (Pipeline::*fn)(bool&)) {
    bool sub = false;
    j[name] = (this->*fn)(sub);
    j[name]["pass"] = sub;
    ok = ok && sub;
  };
  stage("field-info", &Pipeline::field_info);
  stage("char-table", &Pipeline::char_table);
  stage("lvalue", &Pipeline::lvalue_stage);
  stage("symbol", &Pipeline::symbol_stage);
  stage("lift", &Pipeline::lift_stage);
  stage("verify-interp", &Pipeline::verify_interp);
  stage("verify-katz", &Pipeline::verify_katz);
  return j;
}

Json Pipeline::run(const std::string& sub, bool& ok) {
  static const std::map<std::string, Json (Pipeline::*)(bool&)> table = {
      {"field-info", &Pipeline::field_info},   {"char-table", &Pipeline::char_table},
      {"lvalue", &Pipeline::lvalue_stage},     {"symbol", &Pipeline::symbol_stage},
      {"lift", &Pipeline::lift_stage},         {"padic-l", &Pipeline::padic_l},
      {"verify-interp", &Pipeline::verify_interp}, {"verify-katz", &Pipeline::verify_katz},
      {"verify-all", &Pipeline::verify_all}};
  auto it = table.find(sub);
  if (it == table.end()) throw ConfigError("unknown subcommand '" + sub + "'");
  ok = false;
  Json body;
  try {
    body = (this->*(it->second))(ok);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw MathError("stage=" + sub + " error=" + e.what());
  }
  log("stage=" + sub + " event=finished pass=" + (ok ? "1" : "0") + " cache_hits=" + std::to_string(cache_.hits()) +
      " cache_misses=" + std::to_string(cache_.misses()));
  return envelope(sub, std::move(body), ok);
}

Json Pipeline::envelope(const std::string& sub, Json body, bool ok) const {
  Json j;
  j["schema"] = "bianchi-report/1";
  j["subcommand"] = sub;
  j["config"] = cfg_.to_json();
  j["pass"] = ok;
  j["result"] = std::move(body);
  Json t;
  for (auto& [k, v] : timings_) t[k] = std::round(v * 1000.0) / 1000.0;
  j["timings_seconds"] = t;
  return j;
}

}  // namespace bianchi
