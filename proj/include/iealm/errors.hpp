#pragma once

#include <stdexcept>
#include <string>

namespace iealm {

// Precondition breaches (bad widths, out-of-range operands, bad config).
struct ContractViolation : std::logic_error {
    using std::logic_error::logic_error;
};

// Chaotic orbit produced a non-finite coordinate.
struct DivergentOrbit : std::runtime_error {
    long long index;  // iteration at which the orbit left the finite domain
    DivergentOrbit(const std::string& what, long long idx)
        : std::runtime_error(what), index(idx) {}
};

// step_decoupled needs a finite, non-zero x(0)/y(0).
struct RatioUndefined : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidPermutation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Decoded permutation is not a bijection: the oracle's controlling
// sequences changed between queries (i.e. it is not a frozen oracle).
struct NonBijectiveRecovery : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CodebookInconsistent : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EmptyCorpus : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ProtocolError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace iealm
