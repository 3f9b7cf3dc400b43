#pragma once
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "bianchi/dist.hpp"

namespace bianchi {

// key=value log sink; empty means silent
using LogSink = std::function<void(const std::string&)>;

struct LiftOptions {
  int N = 4;         // p-adic precision of the moments
  int M = 0;         // moment bound, 0 means N + max(k, l) + 1
  bool randomize = false;  // random higher moments at the leaves
  uint64_t trial = 0;      // seed of the random moments
};

struct LiftStats {
  int64_t leaves = 0;
  int64_t nodes = 0;
  int64_t nonintegral_leaves = 0;  // leaves whose embedded symbol value has negative valuation
  int min_leaf_valuation = 1 << 20;
  int64_t cusp_checks = 0, cusp_failures = 0;
};

// Node b/(pi_p^i pi_pbar^j) of the divisor tree, b exact.
struct TreeNode {
  IntElem b;
  int i = 0, j = 0;
};

// The eigenlift by dynamic programming down the divisor tree: the value at a node is
// lambda^{-1} Sum_beta value(child_beta)|gamma_beta with gamma_beta = (1 beta; 0 pi_q),
// U_p applied while i < T1, then U_pbar while j < T2; leaves carry the initial lift.
class Lifter {
 public:
  Lifter(const BaseChangeSymbol& sym, LiftOptions opt);
  const LiftOptions& options() const { return opt_; }
  const BaseChangeSymbol& symbol() const { return *sym_; }
  int64_t modulus() const { return q_; }
  int M() const { return M_; }

  // moments mod p^N of the lift at the node, iterated down to (T1, T2)
  std::vector<int64_t> node_moments(const TreeNode& node, int T1, int T2, LiftStats* stats = nullptr) const;
  FinDist node_value(const TreeNode& node, int T1, int T2, LiftStats* stats = nullptr) const;
  // value at {0} - {infinity}
  FinDist eigen_lift(int T1, int T2, LiftStats* stats = nullptr) const { return node_value({{0, 0}, 0, 0}, T1, T2, stats); }
  // initial lift at a node: m00 = iota(c(node)), higher moments zero or random
  std::vector<int64_t> initial_lift(const TreeNode& node, int* v = nullptr) const;

  // embedded symbol value iota(c(b/(pi^t pibar^s))) mod p^N; valuation reported through v
  int64_t embedded_value(const IntElem& b, int t, int s, int* v = nullptr) const;
  int64_t lambda_mod() const { return lam_; }
  int64_t sigma1(const IntElem& x) const;  // mod p^W
  int64_t sigma2(const IntElem& x) const;
  IntElem pi_power(int i, int j) const;

  // nodes at level (i, j) reached from the root, one per residue class (for enumeration tests)
  std::vector<TreeNode> level_nodes(int i, int j) const;

 private:
  const BaseChangeSymbol* sym_;
  LiftOptions opt_;
  int M_ = 0;
  int64_t p_ = 0, q_ = 1, lam_ = 1, laminv_ = 1;
  int W_ = 0;
  int64_t Wmod_ = 1, root_ = 0, rootb_ = 0;
  // translation matrices per operator (0: U_p, 1: U_pbar) and beta, for the two variables
  std::vector<int64_t> A_[2][64], B_[2][64];
  IdealK level_m_;

  void dfs(const IntElem& b, int i, int j, int T1, int T2, int64_t* out, std::vector<std::vector<int64_t>>& work,
           int depth, LiftStats* stats) const;
};

struct ConvergenceStep {
  int t = 0;
  int agreeing = 0;  // moments agreeing with the previous iterate at profile precision
  int total = 0;
};
// root values at depth (t, t) for t = 1..T, each compared with its predecessor; logs one line per step
std::vector<ConvergenceStep> convergence_log(const Lifter& lifter, int T, const LogSink& log = {});

}  // namespace bianchi
