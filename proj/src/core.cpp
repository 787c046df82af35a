// Copyright (c) 2026 The specdec-grid Authors
// SPDX-License-Identifier: Apache-2.0

#include "specgrid/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

namespace specgrid {

void validate_shape(const GridShape & shape) {
    if (shape.height < 1 || shape.width < 1) {
        throw ParamError("grid shape must have height >= 1 and width >= 1");
    }
}

Coord raster_to_coord(int t, const GridShape & shape) {
    validate_shape(shape);
    if (t < 0 || t >= shape.cells()) {
        throw IndexError("raster index " + std::to_string(t) + " out of range [0, " +
                         std::to_string(shape.cells()) + ")");
    }
    return Coord{ t / shape.width, t % shape.width };
}

int coord_to_raster(const Coord & c, const GridShape & shape) {
    validate_shape(shape);
    if (c.row < 0 || c.row >= shape.height || c.col < 0 || c.col >= shape.width) {
        throw IndexError("coordinate (" + std::to_string(c.row) + ", " + std::to_string(c.col) +
                         ") out of range for " + std::to_string(shape.height) + "x" +
                         std::to_string(shape.width) + " grid");
    }
    return c.row * shape.width + c.col;
}

TokenGrid::TokenGrid(GridShape s, std::vector<VocabId> toks) : shape(s), tokens(std::move(toks)) {
    validate_shape(shape);
    if (size() > shape.cells()) {
        throw ContractError("token grid holds more tokens than its shape allows");
    }
}

void TokenGrid::push(VocabId tok) {
    if (size() >= shape.cells()) {
        throw ContractError("token grid is already complete");
    }
    tokens.push_back(tok);
}

void validate_categorical(const Categorical & dist) {
    if (dist.size() == 0) {
        throw ContractError("categorical distribution is empty");
    }
    double total = 0.0;
    for (double m : dist.mass) {
        if (!(m >= 0.0)) {  // also rejects NaN
            throw ContractError("categorical distribution has a negative entry");
        }
        total += m;
    }
    if (std::abs(total - 1.0) > kMassTolerance) {
        throw ContractError("categorical distribution is not normalized (sum = " +
                            format_double(total) + ")");
    }
}

double tvd(const Categorical & a, const Categorical & b) {
    if (a.size() != b.size()) {
        throw ContractError("tvd requires distributions over the same vocabulary");
    }
    double acc = 0.0;
    for (int x = 0; x < a.size(); ++x) {
        acc += std::abs(a.mass[x] - b.mass[x]);
    }
    return 0.5 * acc;
}

Codebook::Codebook(int d, std::vector<double> values) : dim(d), data(std::move(values)) {
    if (dim < 1) {
        throw ParamError("codebook dimension must be >= 1");
    }
    if (data.empty() || data.size() % static_cast<size_t>(dim) != 0) {
        throw ParamError("codebook data size must be a positive multiple of dim");
    }
    for (double v : data) {
        if (!std::isfinite(v)) {
            throw ContractError("codebook vectors must be finite");
        }
    }
}

double codebook_distance_sq(const Codebook & cb, VocabId a, VocabId b) {
    auto   va  = cb.vec(a);
    auto   vb  = cb.vec(b);
    double acc = 0.0;
    for (int d = 0; d < cb.dim; ++d) {
        const double diff = va[d] - vb[d];
        acc += diff * diff;
    }
    return acc;
}

std::vector<VocabId> nearest_neighbors(const Codebook & cb, VocabId center, int k) {
    const int vocab = cb.size();
    if (center < 0 || center >= vocab) {
        throw IndexError("nearest_neighbors center out of range");
    }
    if (k < 1 || k > vocab) {
        throw ParamError("nearest_neighbors requires 1 <= k <= V");
    }

    std::vector<std::pair<double, VocabId>> dists;
    dists.reserve(static_cast<size_t>(vocab) - 1);
    for (VocabId id = 0; id < vocab; ++id) {
        if (id == center) {
            continue;
        }
        dists.emplace_back(codebook_distance_sq(cb, center, id), id);
    }
    std::sort(dists.begin(), dists.end());  // (distance, id) pairs: ties fall back to id order

    std::vector<VocabId> out;
    out.reserve(static_cast<size_t>(k));
    out.push_back(center);
    for (int i = 0; i + 1 < k; ++i) {
        out.push_back(dists[static_cast<size_t>(i)].second);
    }
    return out;
}

void save_codebook(const std::string & path, const Codebook & cb) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open for writing: " + path);
    }
    out << "id,dim=" << cb.dim << "\n";
    for (VocabId id = 0; id < cb.size(); ++id) {
        out << id;
        for (double v : cb.vec(id)) {
            out << "," << format_double(v);
        }
        out << "\n";
    }
    if (!out) {
        throw IoError("write failed: " + path);
    }
}

Codebook load_codebook(const std::string & path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open for reading: " + path);
    }
    std::string header;
    if (!std::getline(in, header) || header.rfind("id,dim=", 0) != 0) {
        throw IoError("bad codebook header in " + path);
    }
    const int dim = std::stoi(header.substr(7));

    std::vector<double> data;
    std::string         line;
    VocabId             expect = 0;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::istringstream row(line);
        std::string        field;
        std::getline(row, field, ',');
        if (std::stoi(field) != expect) {
            throw IoError("codebook rows must appear in ascending id order: " + path);
        }
        int got = 0;
        while (std::getline(row, field, ',')) {
            data.push_back(parse_double(field));
            ++got;
        }
        if (got != dim) {
            throw IoError("codebook row width does not match header dim: " + path);
        }
        ++expect;
    }
    return Codebook(dim, std::move(data));
}

Codebook build_codebook(std::uint64_t seed, int vocab_size, int dim) {
    if (vocab_size < 1 || dim < 1) {
        throw ParamError("codebook needs vocab_size >= 1 and dim >= 1");
    }
    RandomSource rng(seed);
    // Distinct rows make the nearest-template rule in the block sampler
    // unambiguous; with continuous draws a collision is practically
    // impossible, but regenerate a row if one ever occurs.
    std::vector<double> data;
    data.reserve(static_cast<size_t>(vocab_size) * dim);
    for (int id = 0; id < vocab_size; ++id) {
        while (true) {
            std::vector<double> row(static_cast<size_t>(dim));
            for (double & v : row) {
                v = 2.0 * rng.next_unit() - 1.0;
            }
            bool duplicate = false;
            for (int prev = 0; prev < id && !duplicate; ++prev) {
                duplicate = std::equal(row.begin(), row.end(),
                                       data.begin() + static_cast<size_t>(prev) * dim);
            }
            if (!duplicate) {
                data.insert(data.end(), row.begin(), row.end());
                break;
            }
        }
    }
    return Codebook(dim, std::move(data));
}

namespace {

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t RandomSource::next_u64() {
    ++counter_;
    return mix64(seed_ + counter_ * 0x9E3779B97F4A7C15ULL);
}

double RandomSource::next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

RandomSource RandomSource::substream(std::uint64_t stream) const {
    return RandomSource(mix64(seed_ ^ mix64(stream + 0x632BE59BD9B4E019ULL)));
}

VocabId RandomSource::draw_categorical(const Categorical & dist) {
    return sample(dist, *this);
}

bool RandomSource::draw_bernoulli(double p_true) {
    return next_unit() < p_true;
}

VocabId sample(const Categorical & dist, RandomSource & rng) {
    validate_categorical(dist);
    const double u   = rng.next_unit();
    double       cum = 0.0;
    VocabId      last_nonzero = -1;
    for (VocabId id = 0; id < dist.size(); ++id) {
        const double m = dist.mass[id];
        if (m <= 0.0) {
            continue;
        }
        last_nonzero = id;
        cum += m;
        if (u < cum) {
            return id;
        }
    }
    // u fell into the rounding slack past the accumulated total.
    return last_nonzero;
}

std::string format_double(double value) {
    // Try increasing precision until the text parses back bit-identically.
    for (int prec = 15; prec <= 17; ++prec) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.*g", prec, value);
        if (std::strtod(buf, nullptr) == value) {
            return buf;
        }
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

double parse_double(const std::string & text) {
    try {
        size_t       pos = 0;
        const double v   = std::stod(text, &pos);
        if (pos != text.size()) {
            throw IoError("trailing characters in numeric field: '" + text + "'");
        }
        return v;
    } catch (const std::invalid_argument &) {
        throw IoError("bad numeric field: '" + text + "'");
    } catch (const std::out_of_range &) {
        throw IoError("numeric field out of range: '" + text + "'");
    }
}

}  // namespace specgrid
