#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "patchlab/graded.hpp"
#include "patchlab/ordinary.hpp"

namespace patchlab {

// Declared data about R_infinity; the engine never constructs deformation
// rings, towers assert their truncations, dimension and component structure.
struct RinfDescriptor {
  int declared_dim = 1;  // must equal 1 + j + q - l0
  bool p_torsion_free = true;
  bool formally_smooth = false;
  bool irreducible = false;
  std::vector<std::string> generator_names;

  // optional graded desk-model of H^{l0}(P_inf) for faithfulness checks
  bool has_shadow = false;
  GradedModule shadow_module;
  std::vector<std::vector<GVec>> shadow_minimal_primes;
  int shadow_expected_depth = -1;
};

struct TowerConfig {
  enum class Kind { Free, Augmentation, Explicit };
  Kind kind = Kind::Free;
  Int p = 3;
  int m = 1;  // coefficients O = Z/p^m
  int q = 0, j = 0, l0 = 0;
  int levels = 3;
  RinfDescriptor rinf;
  std::vector<Int> T_dims;  // dim_k T^i for i = 0..l0 (condition (a) target)

  // explicit towers: D_M over S_M = (Z/p^m)[(Z/p^M)^q], index M-1
  std::vector<Complex> supplied_complexes;
  // explicit towers: psi matrices per level in the engine's canonical
  // cohomology coordinates (1 x 1 blocks for rank-1 H)
  std::vector<IMat> supplied_psi;

  // fault injection for verification tests: multiply psi by p at this level
  int corrupt_psi_at_level = 0;

  void validate() const;
  RingSpec coeff_ring() const;                 // O = Z/p^m
  RingSpec level_ring(int N) const;            // S_N / pi^N
  RingSpec level_ring_square(int N) const;     // (S_N/pi^N)[z]/(z^N), j > 0
  int coeff_exponent(int N) const { return std::min(N, m); }
  Complex complex_at(int M) const;             // D_M over S_M
};

struct PatchingDatum {
  int level = 0;
  RingSpec ring;  // S_N / pi^N
  Complex P;      // minimized
  std::vector<IVec> phi_images;  // images of R_inf generators in R/d_N
  IMat psi;                      // H^{l0}(P (x) O/pi^cN) -> H/pi^cN
  std::vector<int> psi_src_factors, psi_dst_factors;
  bool psi_corrupted = false;
  std::string fingerprint;
};

PatchingDatum make_datum(const TowerConfig& tower, int M, int N);
PatchingDatum reduce_datum(const TowerConfig& tower, const PatchingDatum& d, int new_level);
std::string datum_fingerprint(const PatchingDatum& d);

enum class Verdict { Pass, LimitConsistent, Unverified, Fail };
std::string verdict_name(Verdict v);

struct ConclusionReport {
  Verdict verdict = Verdict::Unverified;
  std::vector<std::string> notes;
};

struct PatchedResult {
  std::vector<std::pair<int, int>> selected;  // (M_i, N_i), increasing
  std::vector<PatchingDatum> chain;           // entry i at level N_i
  std::string engine_log;
};

/// Pigeonhole extraction of a compatible chain of patching data up to level L.
/// Fails with ERR_PIGEONHOLE when the supplied tower is too shallow.
PatchedResult patch(const TowerConfig& tower, int L);

struct VerificationReport {
  ConclusionReport resolution;   // (i) minimal resolution concentrated at l0
  ConclusionReport actions;      // (ii) R_inf x S action on top cohomology
  ConclusionReport depth;        // (iii) regular-sequence depth certificate
  ConclusionReport top_iso;      // (iv) psi_infinity bijective mod (a + pi^n)
  bool all_pass() const;
};

VerificationReport verify_conclusions(const PatchedResult& r, const TowerConfig& tower);

struct FaithfulnessVerdict {
  enum class Kind { Free, NearlyFaithful, NotNearlyFaithful, Inconclusive } kind;
  Int rank = 0;  // for the free case
  std::vector<std::string> notes;
};

FaithfulnessVerdict faithfulness_check(const PatchedResult& r, const TowerConfig& tower);

// Simultaneous patching of two linked towers (mod-pi comparison data).
struct PairLink {
  bool identity = false;            // generate identity link data
  std::vector<IMat> top_iso_mod_p;  // index N-1: top cohomology iso mod pi at level N
  IMat H_iso_mod_p;                 // H^1/pi -> H^2/pi
  int corrupt_square_at_level = 0;  // fault injection
};

struct PairResult {
  PatchedResult first, second;
  IMat comparison_iso;  // H^{l0}(P^1_inf)/(a+pi) -> H^{l0}(P^2_inf)/(a+pi)
  bool square_commutes = false;
};

PairResult patch_pair(const TowerConfig& t1, const TowerConfig& t2, const PairLink& link, int L);

/// Built-in synthetic towers.
TowerConfig free_tower(Int p, int m, int q, int j, int levels);
TowerConfig augmentation_tower(Int p, int m, int levels);

}  // namespace patchlab
