#pragma once
#include <map>
#include <string>
#include <vector>

#include "bianchi/lift.hpp"

namespace bianchi {

// finite-order character whose psi_f is the SplitLevel character (j1, j2) at level (t, s)
struct CharSpec {
  int t = 0, s = 0;
  int64_t j1 = 0, j2 = 0;
  std::string label() const;
  HeckeCharacter make(const BaseChangeSymbol& sym) const;
};
// primitive unit-trivial characters of exact conductor p^t pbar^s
std::vector<CharSpec> primitive_characters(const BaseChangeSymbol& sym, int t, int s);
// trivial, conductor p^2, pbar^2 and p pbar (the verification set)
std::vector<CharSpec> verification_set(const BaseChangeSymbol& sym);

struct PadicLValue {
  CharSpec chr;
  int q = 0, r = 0;
  int level_t = 0, level_s = 0;  // disc level used for the residue sum
  PadicCyc value;
  int claimed_precision = 0;
  std::vector<std::pair<std::string, int>> losses;
};

struct MellinOptions {
  int T = 4;                        // depth of the divisor tree
  int extra_p = 0, extra_pbar = 0;  // refine the disc level beyond the conductor
  IntElem unit_twist{1, 0};         // reparameterize the residue sum by a global unit
  int q = 0, r = 0;                 // algebraic part x^q y^r
};

// Sum over b in (O/p^t' pbar^s')^x of psi_hat(b) lambda^{-t'-s'} (Psi(b/g)|(1 b; 0 g))(x^q y^r), t' = max(t, 1)
PadicLValue mellin_eval(const Lifter& lifter, const CharSpec& chr, const MellinOptions& opt = {});

struct InterpRecord {
  CharSpec chr;
  PadicLValue lhs;
  CycNum rhs_exact;      // Z W D w / (2 lambda^{t+s}) Lambda(F^p, psi)/Omega
  CycNum zfactor;
  PadicCyc rhs;
  int valuation = 0;     // of lhs - rhs
  bool pass = false;
};
InterpRecord interpolation_check(const Lifter& lifter, const CharSpec& chr, int required, const MellinOptions& opt = {});

struct KatzRecord {
  CharSpec chr;
  PadicLValue lhs;
  CycNum product;        // katz(eta) katz(eta') Omega_norm/Omega_active, recognized
  PadicCyc rhs;
  int valuation = 0;
  bool gauss_identity = false;  // W_p(eta) W_p(eta') = lambda^{-t-s} W(psi) exactly
  bool recognized = false;
  double margin = 0;
  std::string reason;
  bool pass = false;
};
// lhs values already computed (keyed by label) are reused
std::vector<KatzRecord> katz_check(const Lifter& lifter, const std::vector<CharSpec>& set, int required,
                                   const MellinOptions& opt = {},
                                   const std::map<std::string, PadicLValue>* known = nullptr);

}  // namespace bianchi
