#ifndef ZSLEN_H
#define ZSLEN_H

#include <stddef.h>
#include <stdint.h>

typedef enum ZslenStatus {
  ZSLEN_STATUS_OK = 0,
  // A required pointer argument was NULL.
  ZSLEN_STATUS_NULL_POINTER = 1,
  // Malformed literal or non-UTF-8 string.
  ZSLEN_STATUS_PARSE = 2,
  // Arguments violate a mathematical precondition.
  ZSLEN_STATUS_INVALID_ARGUMENT = 3,
  // A resource budget was exhausted; the result would be incomplete.
  ZSLEN_STATUS_BUDGET = 4,
  // An intermediate value left the supported integer range.
  ZSLEN_STATUS_OVERFLOW = 5,
  // Output buffer shorter than the required length.
  ZSLEN_STATUS_BUFFER_TOO_SMALL = 6,
  // I/O or checkpoint failure.
  ZSLEN_STATUS_IO = 7,
  // Internal error, including a caught panic.
  ZSLEN_STATUS_INTERNAL = 8,
} ZslenStatus;

typedef enum ZslenProvenance {
  ZSLEN_PROVENANCE_THEOREM_CYCLIC = 0,
  ZSLEN_PROVENANCE_THEOREM_ELEM2 = 1,
  ZSLEN_PROVENANCE_THEOREM_RANK2 = 2,
  ZSLEN_PROVENANCE_THEOREM_C2C2C2N = 3,
  ZSLEN_PROVENANCE_THEOREM_PPOWER = 4,
  ZSLEN_PROVENANCE_SANDWICH_ONLY = 5,
} ZslenProvenance;

typedef enum ZslenEngine {
  ZSLEN_ENGINE_E1 = 0,
  ZSLEN_ENGINE_E2 = 1,
  ZSLEN_ENGINE_BOTH = 2,
} ZslenEngine;

// Opaque enumerated atom set.
typedef struct ZslenAtomSet ZslenAtomSet;

// Opaque finite abelian group.
typedef struct ZslenGroup ZslenGroup;

// Elasticity `rho_num / rho_den`, value-gcd `d`, and `min_delta`
// (0 when the set of distances is empty).
typedef struct ZslenLocalProfile {
  uint64_t rho_num;
  uint64_t rho_den;
  uint64_t d;
  uint64_t min_delta;
} ZslenLocalProfile;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread; empty if none. The pointer
// stays valid until the next failing call on the same thread.
const char *zslen_last_error(void);

// Group from cyclic factors in any order; factor 1 is dropped.
enum ZslenStatus zslen_group_new(const uint64_t *factors,
                                 size_t len,
                                 struct ZslenGroup **out_group);

// Group from a literal such as `"C2xC4"`.
enum ZslenStatus zslen_group_parse(const char *literal, struct ZslenGroup **out_group);

void zslen_group_free(struct ZslenGroup *group);

// Invariant factors `n_1 | n_2 | ... | n_r`.
enum ZslenStatus zslen_group_factors(const struct ZslenGroup *group,
                                     uint64_t *buf,
                                     size_t cap,
                                     size_t *len);

// `|G|`.
enum ZslenStatus zslen_group_order(const struct ZslenGroup *group, uint64_t *value);

// Number of invariant factors.
enum ZslenStatus zslen_group_rank(const struct ZslenGroup *group, uint64_t *value);

// Largest invariant factor.
enum ZslenStatus zslen_group_exponent(const struct ZslenGroup *group, uint64_t *value);

// `1 + Σ (n_i - 1)`, a lower bound for the Davenport constant.
enum ZslenStatus zslen_group_dstar(const struct ZslenGroup *group, uint64_t *value);

// Davenport constant by atom enumeration; `max_atoms = 0` uses the default
// budget.
enum ZslenStatus zslen_davenport(const struct ZslenGroup *group,
                                 uint64_t max_atoms,
                                 uint64_t *value);

// Atoms over `support` (comma-separated elements, NULL for the whole
// group), sorted by length then lexicographically.
enum ZslenStatus zslen_atoms_enumerate(const struct ZslenGroup *group,
                                       const char *support_text,
                                       uint64_t max_atoms,
                                       struct ZslenAtomSet **out_atoms);

void zslen_atoms_free(struct ZslenAtomSet *atoms);

enum ZslenStatus zslen_atoms_count(const struct ZslenAtomSet *atoms, size_t *count);

// Largest atom length (the Davenport constant of the support).
enum ZslenStatus zslen_atoms_davenport(const struct ZslenAtomSet *atoms, uint64_t *value);

// Number of support elements; the row length of [`zslen_atoms_get`].
enum ZslenStatus zslen_atoms_support_len(const struct ZslenAtomSet *atoms, size_t *len);

// Multiplicities of atom `index`, one per support element.
enum ZslenStatus zslen_atoms_get(const struct ZslenAtomSet *atoms,
                                 size_t index,
                                 uint32_t *buf,
                                 size_t cap,
                                 size_t *len);

// Atom `index` rendered as `g^m · h^k`, NUL-terminated; `*len` counts the
// terminator.
enum ZslenStatus zslen_atoms_format(const struct ZslenAtomSet *atoms,
                                    size_t index,
                                    char *buf,
                                    size_t cap,
                                    size_t *len);

// `min Δ` of the zero-sum monoid over `support`; writes 0 when the set of
// distances is empty (half-factorial).
enum ZslenStatus zslen_min_delta(const struct ZslenGroup *group,
                                 const char *support_text,
                                 uint64_t max_atoms,
                                 uint64_t *value);

// `Δ_ρ*(G)` in ascending order, with the rule that produced it. Nonzero
// `enumerate` forces enumeration of qualifying supports.
enum ZslenStatus zslen_delta_rho_star(const struct ZslenGroup *group,
                                      int32_t enumerate,
                                      uint64_t max_atoms,
                                      uint64_t *buf,
                                      size_t cap,
                                      size_t *len,
                                      enum ZslenProvenance *provenance);

// Regular continued fraction of `n/a`.
enum ZslenStatus zslen_cf_regular(uint64_t n, uint64_t a, uint64_t *buf, size_t cap, size_t *len);

// `min Δ({g, ag})` in `C_n` from the continued fraction of `n/a`.
enum ZslenStatus zslen_min_delta_pair_cf(uint64_t n, uint64_t a, uint64_t *value);

// `min Δ({±g, ±ag})` in `C_n` for `2 <= a < n/2`.
enum ZslenStatus zslen_min_delta_quad_cf(uint64_t n, uint64_t a, uint64_t *value);

// Smallest `a` certifying an extra element of `Δ_ρ*(C_n)`, or 0 if none.
enum ZslenStatus zslen_cyclic_witness(uint64_t n, uint64_t *value);

// Even `n` in `[lo, hi]` with `Δ_ρ*(C_n) = {1, n-2}`.
enum ZslenStatus zslen_scan_exceptional(uint64_t lo,
                                        uint64_t hi,
                                        enum ZslenEngine engine,
                                        size_t shards,
                                        uint64_t *buf,
                                        size_t cap,
                                        size_t *len);

// Profile of the monoid generated by `class:value` pairs in `Z_q x N`.
enum ZslenStatus zslen_fp_profile(uint64_t q,
                                  const char *generators,
                                  struct ZslenLocalProfile *profile);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ZSLEN_H */
