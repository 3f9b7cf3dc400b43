#include <random>
#include <set>

#include "bianchi/lift.hpp"

namespace bianchi {

namespace {
int vp64(int64_t x, int64_t p, int cap) {
  if (x == 0) return cap;
  int v = 0;
  while (v < cap && x % p == 0) {
    x /= p;
    ++v;
  }
  return v;
}
}  // namespace

Lifter::Lifter(const BaseChangeSymbol& sym, LiftOptions opt) : sym_(&sym), opt_(opt) {
  const BaseChange& bc = sym.context();
  const FieldK& K = *bc.K;
  p_ = bc.emb->prime();
  M_ = opt_.M > 0 ? opt_.M : opt_.N + std::max(bc.k, bc.k) + 1;
  if (M_ > 8 || p_ > 63) throw MathError("Lifter: moment bound or prime out of range");
  q_ = ipow(p_, opt_.N);
  if (q_ >= (int64_t(1) << 31)) throw MathError("Lifter: p^N too large for the integer kernel");
  W_ = 12;
  Wmod_ = ipow(p_, W_);
  root_ = hensel_root(K.omega_minpoly(), p_, W_, mod64(bc.emb->omega().residue(), p_)).residue();
  rootb_ = mod64(K.omega_trace() - root_, Wmod_);
  PadicNum lam = bc.emb->embed(bc.lambda);
  if (lam.valuation() != 0) throw MathError("Lifter: U eigenvalue is not a p-adic unit (not ordinary)");
  lam_ = mod64(lam.residue(), q_);
  laminv_ = invmod(lam_, q_);
  const IntElem pis[2] = {bc.pi_p, bc.pi_pbar};
  for (int op = 0; op < 2; ++op)
    for (int64_t beta = 0; beta < p_; ++beta) {
      A_[op][beta] = translation_matrix(beta, mod64(sigma1(pis[op]), q_), M_, q_);
      B_[op][beta] = translation_matrix(beta, mod64(sigma2(pis[op]), q_), M_, q_);
    }
  level_m_ = ideal_mul(K, bc.phi.modulus(), ideal_conj(K, bc.phi.modulus()));
}

int64_t Lifter::sigma1(const IntElem& x) const {
  return mod64(mod64(x.x, Wmod_) + mulmod(mod64(x.y, Wmod_), root_, Wmod_), Wmod_);
}
int64_t Lifter::sigma2(const IntElem& x) const {
  return mod64(mod64(x.x, Wmod_) + mulmod(mod64(x.y, Wmod_), rootb_, Wmod_), Wmod_);
}

IntElem Lifter::pi_power(int i, int j) const {
  const BaseChange& bc = sym_->context();
  const FieldK& K = *bc.K;
  return K.mul(K.pow(bc.pi_p, i), K.pow(bc.pi_pbar, j));
}

int64_t Lifter::embedded_value(const IntElem& b, int t, int s, int* v) const {
  const int64_t den = sym_->options().denominator;
  IntElem n = sym_->value_num(t, s, t ? mod64(sigma1(b), ipow(p_, t)) : 0, s ? mod64(sigma2(b), ipow(p_, s)) : 0);
  int e = vp64(den, p_, 30);
  int64_t dp = den / ipow(p_, e);
  const int64_t big = ipow(p_, opt_.N + e);
  int64_t s1 = mod64(mod64(n.x, big) + mulmod(mod64(n.y, big), mod64(root_, big), big), big);
  int val = vp64(s1, p_, opt_.N + e) - e;
  if (v) *v = val;
  if (val < 0) return 0;
  return mulmod(mod64(s1 / ipow(p_, e), q_), invmod(mod64(dp, q_), q_), q_);
}

std::vector<int64_t> Lifter::initial_lift(const TreeNode& node, int* v) const {
  std::vector<int64_t> m((size_t)(M_ * M_), 0);
  m[0] = embedded_value(node.b, node.i, node.j, v);
  if (opt_.randomize) {
    std::seed_seq seq{(uint64_t)node.b.x, (uint64_t)node.b.y, (uint64_t)node.i, (uint64_t)node.j, opt_.trial};
    std::mt19937_64 rng(seq);
    for (size_t k = 1; k < m.size(); ++k) m[k] = (int64_t)(rng() % (uint64_t)q_);
  }
  return m;
}

void Lifter::dfs(const IntElem& b, int i, int j, int T1, int T2, int64_t* out, std::vector<std::vector<int64_t>>& work,
                 int depth, LiftStats* stats) const {
  const int MM = M_ * M_;
  if (i == T1 && j == T2) {
    int v = 0;
    std::vector<int64_t> m = initial_lift({b, i, j}, &v);
    if (stats) {
      ++stats->leaves;
      stats->min_leaf_valuation = std::min(stats->min_leaf_valuation, v);
      if (v < 0) ++stats->nonintegral_leaves;
    }
    std::copy(m.begin(), m.end(), out);
    return;
  }
  const FieldK& K = *sym_->context().K;
  if (stats) {
    ++stats->nodes;
    if (i + j <= 3) {
      ++stats->cusp_checks;
      if (!cusp_in_C(K, level_m_, 1, make_cusp(K, b, pi_power(i, j)))) ++stats->cusp_failures;
    }
  }
  const bool at_p = i < T1;
  const int op = at_p ? 0 : 1;
  IntElem g = pi_power(i, j);
  int64_t* acc = work[(size_t)depth].data();
  int64_t* child = acc + MM;
  int64_t* moved = child + MM;
  int64_t* scratch = moved + MM;
  std::fill(acc, acc + MM, 0);
  for (int64_t beta = 0; beta < p_; ++beta) {
    IntElem cb = K.add(b, K.scale(g, beta));
    dfs(cb, at_p ? i + 1 : i, at_p ? j : j + 1, T1, T2, child, work, depth + 1, stats);
    apply_lower(A_[op][beta], B_[op][beta], child, moved, M_, q_, scratch);
    for (int k = 0; k < MM; ++k) acc[k] += moved[k];
  }
  for (int k = 0; k < MM; ++k) out[k] = mod64(acc[k], q_) * laminv_ % q_;
}

std::vector<int64_t> Lifter::node_moments(const TreeNode& node, int T1, int T2, LiftStats* stats) const {
  if (node.i > T1 || node.j > T2) throw MathError("node_moments: node below the tree depth");
  const int depth = (T1 - node.i) + (T2 - node.j) + 1;
  std::vector<std::vector<int64_t>> work((size_t)depth, std::vector<int64_t>((size_t)(4 * M_ * M_)));
  std::vector<int64_t> out((size_t)(M_ * M_));
  dfs(node.b, node.i, node.j, T1, T2, out.data(), work, 0, stats);
  return out;
}

FinDist Lifter::node_value(const TreeNode& node, int T1, int T2, LiftStats* stats) const {
  const BaseChange& bc = sym_->context();
  return FinDist::from_ints(p_, bc.k, bc.k, M_, opt_.N, node_moments(node, T1, T2, stats));
}

std::vector<TreeNode> Lifter::level_nodes(int i, int j) const {
  // walk the "U_p first" expansion from the root; residues b mod pi^i pibar^j are distinct by construction
  const FieldK& K = *sym_->context().K;
  std::vector<TreeNode> cur{{{0, 0}, 0, 0}};
  for (int a = 0; a < i + j; ++a) {
    std::vector<TreeNode> next;
    for (auto& n : cur) {
      bool at_p = n.i < i;
      IntElem g = pi_power(n.i, n.j);
      for (int64_t beta = 0; beta < p_; ++beta)
        next.push_back({K.add(n.b, K.scale(g, beta)), at_p ? n.i + 1 : n.i, at_p ? n.j : n.j + 1});
    }
    cur = std::move(next);
  }
  return cur;
}

std::vector<ConvergenceStep> convergence_log(const Lifter& lifter, int T, const LogSink& log) {
  std::vector<ConvergenceStep> out;
  FinDist prev = lifter.eigen_lift(0, 0);
  for (int t = 1; t <= T; ++t) {
    FinDist cur = lifter.eigen_lift(t, t);
    ConvergenceStep st;
    st.t = t;
    for (int i = 0; i < cur.M; ++i)
      for (int j = 0; j < cur.M; ++j) {
        ++st.total;
        if ((cur.at(i, j) - prev.at(i, j)).reduce_absprec(cur.profile(i, j)).is_zero()) ++st.agreeing;
      }
    if (log)
      log("stage=lift event=sweep t=" + std::to_string(t) + " agreeing=" + std::to_string(st.agreeing) +
          " total=" + std::to_string(st.total));
    out.push_back(st);
    prev = std::move(cur);
  }
  return out;
}

}  // namespace bianchi
