#pragma once

#include <stdexcept>
#include <string>

namespace qnc {

// Base class of all library errors. The CLI maps ConfigError and its
// siblings raised during input handling to exit code 2; failed
// verification verdicts are reported with exit code 1 without throwing.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define QNC_DEFINE_ERROR(NAME)              \
  class NAME : public Error {               \
   public:                                  \
    using Error::Error;                     \
  }

QNC_DEFINE_ERROR(DivisionByZero);   // inversion of the zero field element
QNC_DEFINE_ERROR(FieldMismatch);    // operands built over different fields
QNC_DEFINE_ERROR(SingularMatrix);   // inverse of a rank-deficient matrix
QNC_DEFINE_ERROR(DegenerateSpan);   // spanning set passed where a basis is required
QNC_DEFINE_ERROR(DegenerateForm);   // alternating form vanishes on the given span
QNC_DEFINE_ERROR(DimensionError);   // vector/matrix sizes inconsistent with the context
QNC_DEFINE_ERROR(NotSymplectic);    // matrix fails g^T J g = J
QNC_DEFINE_ERROR(SynthesisFailed);  // no unitary realizing the requested label action
QNC_DEFINE_ERROR(NotADag);          // network graph contains a cycle
QNC_DEFINE_ERROR(DegreeError);      // node in/out degree or terminal degree mismatch
QNC_DEFINE_ERROR(NotClifford);      // operation requires symplectic layer data
QNC_DEFINE_ERROR(NoCapacity);       // sacrificed registers exhaust the network width
QNC_DEFINE_ERROR(ConverseMismatch); // decoded channel fails to factorize as expected
QNC_DEFINE_ERROR(NotInvertible);    // classical node map is not a bijection
QNC_DEFINE_ERROR(InvalidTriple);    // rank triple outside the realizable range
QNC_DEFINE_ERROR(InvalidState);     // operator fails a unitarity/density/distribution check
QNC_DEFINE_ERROR(ResourceLimit);    // simulation size above the exact-computation budget
QNC_DEFINE_ERROR(ConfigError);      // malformed or schema-violating configuration
QNC_DEFINE_ERROR(InternalError);    // invariant violation; indicates a library bug

#undef QNC_DEFINE_ERROR

}  // namespace qnc
