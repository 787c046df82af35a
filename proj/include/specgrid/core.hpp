// Copyright (c) 2026 The specdec-grid Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace specgrid {

// Token identifier in [0, V). The sentinel value V (one past the vocabulary)
// is reserved by models for missing neighbors at grid borders.
using VocabId = std::int32_t;

// ---------------------------------------------------------------------------
// Error taxonomy. The CLI maps these onto exit codes, everything else just
// throws.
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Out-of-range raster index or 2D coordinate.
class IndexError : public Error {
  public:
    using Error::Error;
};

// Invalid argument value (k > V, vocab too small, bad factor, ...).
class ParamError : public Error {
  public:
    using Error::Error;
};

// A call-contract violation: unnormalized distribution, impossible draft,
// degenerate residual, mismatched dimensions.
class ContractError : public Error {
  public:
    using Error::Error;
};

// Invalid run configuration (decoder/parameter mismatch).
class ConfigError : public Error {
  public:
    using Error::Error;
};

class IoError : public Error {
  public:
    using Error::Error;
};

// Raised by the enumeration oracle when an instance exceeds its branch budget.
class EnumerationLimitError : public Error {
  public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Grids
// ---------------------------------------------------------------------------

struct GridShape {
    int height = 0;
    int width  = 0;

    int cells() const { return height * width; }

    bool operator==(const GridShape &) const = default;
};

// Validates height >= 1 and width >= 1.
void validate_shape(const GridShape & shape);

// Raster index t of cell (i, j) is t = i*width + j.
struct Coord {
    int row = 0;
    int col = 0;

    bool operator==(const Coord &) const = default;
};

Coord raster_to_coord(int t, const GridShape & shape);
int   coord_to_raster(const Coord & c, const GridShape & shape);

// A 2D raster of tokens. A partially generated grid is a prefix in raster
// order; tokens.size() never exceeds shape.cells().
struct TokenGrid {
    GridShape            shape;
    std::vector<VocabId> tokens;

    explicit TokenGrid(GridShape s = {}) : shape(s) {}
    TokenGrid(GridShape s, std::vector<VocabId> toks);

    int  size() const { return static_cast<int>(tokens.size()); }
    bool complete() const { return size() == shape.cells(); }

    void push(VocabId tok);

    bool operator==(const TokenGrid &) const = default;
};

// ---------------------------------------------------------------------------
// Categorical distributions
// ---------------------------------------------------------------------------

// Absolute tolerance on the total mass of a Categorical.
inline constexpr double kMassTolerance = 1e-9;

// A normalized probability vector over a finite vocabulary.
struct Categorical {
    std::vector<double> mass;

    Categorical() = default;
    explicit Categorical(std::vector<double> m) : mass(std::move(m)) {}

    int    size() const { return static_cast<int>(mass.size()); }
    double operator[](VocabId id) const { return mass[static_cast<size_t>(id)]; }
};

// Throws ContractError unless all entries are >= 0 and they sum to 1 within
// kMassTolerance.
void validate_categorical(const Categorical & dist);

// Total variation distance, (1/2) * sum |a(x) - b(x)|.
double tvd(const Categorical & a, const Categorical & b);

// ---------------------------------------------------------------------------
// Codebook
// ---------------------------------------------------------------------------

// One latent vector per VocabId, row-major. Defines the geometry used for
// neighborhood pooling.
struct Codebook {
    int                 dim = 0;
    std::vector<double> data;  // size() * dim entries

    Codebook() = default;
    Codebook(int d, std::vector<double> values);

    int size() const { return dim > 0 ? static_cast<int>(data.size()) / dim : 0; }

    std::span<const double> vec(VocabId id) const {
        return std::span<const double>(data).subspan(static_cast<size_t>(id) * dim, dim);
    }
};

// Squared Euclidean distance between the vectors of two tokens.
double codebook_distance_sq(const Codebook & cb, VocabId a, VocabId b);

// The k tokens nearest to `center`, ascending by squared Euclidean distance,
// ties broken by ascending id. The center itself is always first.
std::vector<VocabId> nearest_neighbors(const Codebook & cb, VocabId center, int k);

// Plain-text CSV with header `id,dim=<d>` and one row per token in ascending
// id order. Values are printed with enough digits to round-trip exactly.
void     save_codebook(const std::string & path, const Codebook & cb);
Codebook load_codebook(const std::string & path);

// Pseudo-random codebook with pairwise-distinct rows.
Codebook build_codebook(std::uint64_t seed, int vocab_size, int dim);

// ---------------------------------------------------------------------------
// Randomness
// ---------------------------------------------------------------------------

// Every stochastic choice a decoder makes goes through this interface, so a
// run can be driven either by a seeded generator or by the oracle's
// exhaustive branch enumerator.
class StochasticSource {
  public:
    virtual ~StochasticSource() = default;

    // Returns an id with probability dist.mass[id]. Never returns an id with
    // zero mass.
    virtual VocabId draw_categorical(const Categorical & dist) = 0;

    // Returns true with probability p_true.
    virtual bool draw_bernoulli(double p_true) = 0;
};

// Counter-based deterministic generator: output i is a SplitMix64-style mix
// of (seed, i). Identical seeds and draw sequences replay identically on
// every platform; the algorithm identifier is recorded in reports.
class RandomSource final : public StochasticSource {
  public:
    static constexpr const char * kAlgorithm = "splitmix64-counter/v1";

    explicit RandomSource(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t counter() const { return counter_; }

    std::uint64_t next_u64();

    // Uniform double in [0, 1).
    double next_unit();

    // An independent source derived from (seed, stream); used to fan out
    // sweep points and table rows without sharing a draw sequence.
    RandomSource substream(std::uint64_t stream) const;

    VocabId draw_categorical(const Categorical & dist) override;
    bool    draw_bernoulli(double p_true) override;

  private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

// Draws one token from a validated categorical distribution.
VocabId sample(const Categorical & dist, RandomSource & rng);

// ---------------------------------------------------------------------------
// Formatting helpers shared by the text serializers
// ---------------------------------------------------------------------------

// Shortest decimal form that parses back to the identical double.
std::string format_double(double value);
double      parse_double(const std::string & text);

}  // namespace specgrid
