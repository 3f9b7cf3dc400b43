// Acceptance run on the reference instance: one line per criterion, exit 0 iff all pass.
#include <chrono>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "bianchi/cli.hpp"

using namespace bianchi;

namespace {

// pinned tolerances
const char* kLvalueTolerance = "1e-20";
constexpr int64_t kStreamCutoff = 10000;
constexpr int64_t kGaussNormBound = 100;
constexpr int kMinInterpCharacters = 8;

struct Line {
  std::string id;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

std::vector<Line> lines;
bool all_pass = true;

template <class F>
void criterion(const std::string& id, F&& body) {
  auto t0 = std::chrono::steady_clock::now();
  Line l;
  l.id = id;
  try {
    l.pass = body(l.detail);
  } catch (const std::exception& e) {
    l.pass = false;
    l.detail = std::string("error: ") + e.what();
  }
  l.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  all_pass = all_pass && l.pass;
  std::printf("%s %s %s seconds=%.1f\n", l.id.c_str(), l.pass ? "PASS" : "FAIL", l.detail.c_str(), l.seconds);
  std::fflush(stdout);
  lines.push_back(l);
}

int affine_points_plus_infinity(int q) {
  int n = 1;
  for (int x = 0; x < q; ++x)
    for (int y = 0; y < q; ++y)
      if (((y * y - x * x * x + x) % q + q) % q == 0) ++n;
  return n;
}

// every finite-order table on (O/f)^x, primitive ones only
std::vector<HeckeCharacter> primitive_tables(const FieldK& K, const IdealK& f) {
  ResidueGroup rg(K, f);
  std::vector<HeckeCharacter> out;
  const auto& ords = rg.gen_orders();
  std::vector<int64_t> e(ords.size(), 0);
  while (true) {
    std::vector<std::pair<IntElem, mpq_class>> tab;
    for (size_t k = 0; k < ords.size(); ++k) tab.push_back({rg.generators()[k], mpq_class(e[k], ords[k])});
    auto psi = HeckeCharacter::from_pairs(K, f, {}, tab);
    if (psi.is_primitive()) out.push_back(psi);
    size_t k = 0;
    while (k < e.size() && ++e[k] == ords[k]) e[k++] = 0;
    if (k == e.size()) break;
  }
  return out;
}

struct Verdicts {
  std::vector<std::pair<std::string, bool>> interp, katz;
  int interp_pass = 0, katz_pass = 0;
  std::string c0;
};

Verdicts verdicts_of(Pipeline& pipe) {
  Verdicts v;
  bool ok = false;
  Json ji = pipe.run("verify-interp", ok);
  for (auto& r : ji["result"]["records"]) {
    v.interp.push_back({r["character"]["label"].get<std::string>(), r["pass"].get<bool>()});
    v.interp_pass += r["pass"].get<bool>();
  }
  Json jk = pipe.run("verify-katz", ok);
  for (auto& r : jk["result"]["records"]) {
    v.katz.push_back({r["character"]["label"].get<std::string>(), r["pass"].get<bool>()});
    v.katz_pass += r["pass"].get<bool>();
  }
  v.c0 = pipe.field().str(pipe.symbol(0, 0).value_num(0, 0, 0, 0));
  return v;
}

// verdict sequence by conductor class, independent of how characters are labelled
std::string shape(const std::vector<std::pair<std::string, bool>>& recs) {
  std::string s;
  for (auto& [label, pass] : recs) s += label.substr(0, label.find('j')) + (pass ? "+" : "-");
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria on the reference instance"};
  std::string cache_dir;
  bool verbose = false;
  app.add_option("--cache", cache_dir, "cache directory");
  app.add_flag("-v,--verbose", verbose, "print pipeline log lines");
  CLI11_PARSE(app, argc, argv);

  LogSink log;
  if (verbose) log = [](const std::string& l) { std::cerr << l << '\n'; };

  PipelineConfig cfg;  // defaults are the reference instance
  cfg.cache_dir = cache_dir;
  Pipeline pipe(cfg, log);
  const FieldK& K = pipe.field();
  const BaseChange& bc = pipe.base_change();
  const int N = cfg.N, T = cfg.T;
  const int need = N - 2;

  criterion("A1", [&](std::string& d) {
    int a5 = 5 + 1 - affine_points_plus_infinity(5);
    CycNum ap = bc.beta + bc.lambda;
    d = "point_count_a5=" + std::to_string(a5) + " phi_p+phi_pbar=" + ap.str();
    return a5 == -2 && ap == CycNum::from_int(a5);
  });

  criterion("A2", [&](std::string& d) {
    int vl = pipe.embedding().embed(bc.lambda).valuation(), vb = pipe.embedding().embed(bc.beta).valuation();
    d = "v(phi(pbar))=" + std::to_string(vl) + " v(phi(p))=" + std::to_string(vb);
    return vl == 0 && vb == cfg.k + 1;
  });

  criterion("A3", [&](std::string& d) {
    const HeckeCharacter phic = bc.phi.conj();
    // conductor pbar, infinity type (1,0), eps(i) = i
    HeckeCharacter psi1 = HeckeCharacter::from_pairs(K, bc.Pb, {1, 0}, {{{0, 1}, mpq_class(1, 4)}});
    if (!psi1.unit_compatible() || psi1.conductor() != bc.Pb) throw MathError("test character is not what it should be");
    bool ok = true;
    std::ostringstream o;
    const Real tol(kLvalueTolerance);
    int idx = 0;
    for (const HeckeCharacter& psi : {HeckeCharacter::trivial(K), psi1}) {
      bool streams = coeffs_of_bianchi(K, bc.phi, psi, kStreamCutoff).agree;
      ComplexVal L1 = pipe.lvalue(phic.mul(psi), 1.0), L2 = pipe.lvalue(phic.mul(psi.conj()).mul(bc.lambdaK), 1.0);
      ComplexVal A1 = pipe.lvalue(phic.mul(psi).mul(bc.lambdaK), 1.0), A2 = pipe.lvalue(phic.mul(psi.conj()), 1.0);
      Real diff = (L1.value * L2.value - A1.value * A2.value).abs();
      double err = L1.err + L2.err + A1.err + A2.err;
      bool pass = streams && diff < tol && err < 1e-20;
      ok = ok && pass;
      o << (idx++ ? " " : "") << (psi.is_trivial() ? "trivial" : "cond_pbar_type10") << ":streams=" << streams
        << ",diff=" << diff.str(3, std::ios_base::scientific) << ",err=" << err;
    }
    d = o.str();
    return ok;
  });

  criterion("A4", [&](std::string& d) {
    int64_t chars = 0, bad = 0, orth = 0, orth_bad = 0;
    for (auto& [g, norm] : ideals_up_to(K, kGaussNormBound)) {
      IdealK f = IdealK::principal(K, g);
      if (f.is_unit_ideal()) continue;
      for (auto& psi : primitive_tables(K, f)) {
        CycNum W = gauss_sum_W(psi);
        ++chars;
        if (!((W * W.conj()).minimized() == CycNum::from_int(norm))) ++bad;
      }
    }
    for (const IdealK& f : {bc.P, ideal_pow(K, bc.P, 2), ideal_mul(K, bc.P, bc.Pb)})
      for (auto& psi : primitive_tables(K, f))
        for (int64_t idx = 0; idx < f.norm(); ++idx) {
          IntElem c = f.from_index(idx);
          CycNum lhs = orthogonality_lhs(psi, c);
          ++orth;
          bool good = psi.coprime(c) ? lhs == psi.psi_f(c).inv() : lhs.is_zero();
          if (!good) ++orth_bad;
        }
    d = "characters=" + std::to_string(chars) + " norm_failures=" + std::to_string(bad) +
        " orthogonality_checks=" + std::to_string(orth) + " failures=" + std::to_string(orth_bad);
    return chars > 0 && bad == 0 && orth > 0 && orth_bad == 0;
  });

  Lifter& lifter = pipe.lifter();
  LiftStats root_stats;
  FinDist root = lifter.eigen_lift(T, T, &root_stats);

  criterion("A5", [&](std::string& d) {
    std::vector<FinDist> runs;
    for (uint64_t trial : {101u, 202u}) {
      LiftOptions o = lifter.options();
      o.randomize = true;
      o.trial = trial;
      Lifter R(lifter.symbol(), o);
      runs.push_back(R.eigen_lift(T, T));
    }
    // the random starts must actually differ
    LiftOptions o = lifter.options();
    o.randomize = true;
    o.trial = 101;
    bool starts_differ = Lifter(lifter.symbol(), o).initial_lift({{0, 0}, T, T}) !=
                         Lifter(lifter.symbol(), LiftOptions{o.N, o.M, true, 202}).initial_lift({{0, 0}, T, T});
    bool agree = runs[0].agrees(runs[1]);
    d = "moments=" + std::to_string(root.M * root.M) + " starts_differ=" + std::to_string(starts_differ) +
        " agree=" + std::to_string(agree) + " agree_with_plain=" + std::to_string(runs[0].agrees(root));
    return starts_differ && agree;
  });

  criterion("A6", [&](std::string& d) {
    pipe.symbol(T + 1, T);
    pipe.symbol(T, T + 1);
    bool up = lifter.eigen_lift(T + 1, T).agrees(root);
    bool upbar = lifter.eigen_lift(T, T + 1).agrees(root);
    d = "extra_U_p=" + std::to_string(up) + " extra_U_pbar=" + std::to_string(upbar);
    return up && upbar;
  });

  Verdicts base;
  criterion("A7", [&](std::string& d) {
    base = verdicts_of(pipe);
    d = "characters=" + std::to_string(base.interp.size()) + " passing=" + std::to_string(base.interp_pass) +
        " required_valuation=" + std::to_string(need);
    return (int)base.interp.size() >= kMinInterpCharacters && base.interp_pass == (int)base.interp.size();
  });

  criterion("A8", [&](std::string& d) {
    bool ok = false;
    Json jk = pipe.run("verify-katz", ok);
    int gauss = 0, n = 0;
    for (auto& r : jk["result"]["records"]) {
      ++n;
      gauss += r["gauss_identity"].get<bool>();
    }
    d = "characters=" + std::to_string(n) + " passing=" + std::to_string(base.katz_pass) +
        " gauss_identity_exact=" + std::to_string(gauss);
    return ok && n >= kMinInterpCharacters && gauss == n;
  });

  criterion("A9", [&](std::string& d) {
    int64_t nodes = 0, nonint = 0;
    for (int i = 0; i <= 2; ++i)
      for (int j = 0; j <= 2; ++j)
        for (auto& node : lifter.level_nodes(i, j)) {
          ++nodes;
          if (lifter.node_value(node, T, T).min_valuation() < 0) ++nonint;
        }
    DistNorm nrm = dist_norm(root, 0, 0);
    d = "leaves=" + std::to_string(root_stats.leaves) + " nonintegral_leaves=" + std::to_string(root_stats.nonintegral_leaves) +
        " tracked_nodes=" + std::to_string(nodes) + " nonintegral_nodes=" + std::to_string(nonint) +
        " root_norm_log_p=" + std::to_string(nrm.zero ? 0 : nrm.log_p);
    return root_stats.nonintegral_leaves == 0 && nonint == 0 && root.min_valuation() >= 0;
  });

  criterion("A10", [&](std::string& d) {
    PipelineConfig alt = cfg;
    alt.unit_p = {0, 1};
    alt.unit_pbar = {-1, 0};
    Pipeline rescaled(alt, log);
    Verdicts vr = verdicts_of(rescaled);
    PipelineConfig other = cfg;
    other.seed = 68;
    Pipeline swapped(other, log);
    Verdicts vs = verdicts_of(swapped);
    bool same_r = vr.interp == base.interp && vr.katz == base.katz;
    bool same_s = shape(vs.interp) == shape(base.interp) && shape(vs.katz) == shape(base.katz);
    d = "rescaled_verdicts_same=" + std::to_string(same_r) + " seed68_verdicts_same=" + std::to_string(same_s) +
        " c0=" + base.c0 + "/100 c0_rescaled=" + vr.c0 + "/100 c0_seed68=" + vs.c0 + "/100";
    return same_r && same_s;
  });

  criterion("A11", [&](std::string& d) {
    BaseChangeSymbol& sym = pipe.symbol(2, 2);
    int checked = 0, failures = 0;
    for (int a = 0; a <= 2; ++a)
      for (int b = 0; b <= 2; ++b) {
        RoundTrip rt = sym.round_trip(a, b);
        checked += rt.checked;
        failures += (int)rt.failures.size();
      }
    d = "levels=9 checked=" + std::to_string(checked) + " failures=" + std::to_string(failures);
    return checked > 0 && failures == 0;
  });

  std::printf("A12 SKIP optional k=1 run not implemented\n");
  std::printf("summary pass=%d criteria=%zu\n", all_pass ? 1 : 0, lines.size());
  return all_pass ? 0 : 1;
}
