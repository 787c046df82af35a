// Copyright (c) 2026 The specdec-grid Authors
// SPDX-License-Identifier: Apache-2.0

#include "specgrid/models.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace specgrid {

namespace {

// Row index for (left, above, cond) with left/above in [0, V] and cond in
// [0, V).
int context_index(int vocab, VocabId left, VocabId above, VocabId cond) {
    return (left * (vocab + 1) + above) * vocab + cond;
}

void check_context(int vocab, VocabId left, VocabId above, VocabId cond) {
    if (left < 0 || left > vocab || above < 0 || above > vocab || cond < 0 || cond >= vocab) {
        throw IndexError("toy model context out of range");
    }
}

}  // namespace

ToyMarkovModel::ToyMarkovModel(std::uint64_t seed, int vocab_size, GridShape shape,
                               double temperature, std::vector<Categorical> table)
    : seed_(seed),
      vocab_size_(vocab_size),
      shape_(shape),
      temperature_(temperature),
      table_(std::move(table)) {
    if (vocab_size_ < 2) {
        throw ParamError("toy model needs vocab_size >= 2");
    }
    validate_shape(shape_);
    if (static_cast<int>(table_.size()) != context_count()) {
        throw ParamError("toy model table has wrong row count");
    }
    for (const Categorical & row : table_) {
        if (row.size() != vocab_size_) {
            throw ParamError("toy model table row has wrong width");
        }
        validate_categorical(row);
    }
}

const Categorical & ToyMarkovModel::row(VocabId left, VocabId above, VocabId cond) const {
    check_context(vocab_size_, left, above, cond);
    return table_[static_cast<size_t>(context_index(vocab_size_, left, above, cond))];
}

Categorical ToyMarkovModel::evaluate(const Conditioning & cond, const TokenGrid & prefix,
                                     int position) const {
    if (prefix.shape != shape_) {
        throw ContractError("prefix shape does not match model shape");
    }
    if (position < 0 || position >= shape_.cells()) {
        throw IndexError("evaluate position out of range");
    }
    if (prefix.size() < position) {
        throw ContractError("prefix does not cover all cells before the position");
    }
    const Coord   c     = raster_to_coord(position, shape_);
    const VocabId left  = c.col > 0 ? prefix.tokens[static_cast<size_t>(position) - 1] : sentinel();
    const VocabId above = c.row > 0
                              ? prefix.tokens[static_cast<size_t>(position - shape_.width)]
                              : sentinel();
    return row(left, above, cond.seed_token);
}

bool ToyMarkovModel::operator==(const ToyMarkovModel & other) const {
    if (seed_ != other.seed_ || vocab_size_ != other.vocab_size_ || !(shape_ == other.shape_) ||
        temperature_ != other.temperature_ || table_.size() != other.table_.size()) {
        return false;
    }
    for (size_t i = 0; i < table_.size(); ++i) {
        if (table_[i].mass != other.table_[i].mass) {
            return false;
        }
    }
    return true;
}

ToyMarkovModel build_toy_model(std::uint64_t model_seed, int vocab_size, GridShape shape,
                               double temperature) {
    if (vocab_size < 2) {
        throw ParamError("build_toy_model needs vocab_size >= 2");
    }
    if (!(temperature > 0.0)) {
        throw ParamError("build_toy_model needs temperature > 0");
    }
    validate_shape(shape);

    const int                rows = (vocab_size + 1) * (vocab_size + 1) * vocab_size;
    std::vector<Categorical> table;
    table.reserve(static_cast<size_t>(rows));
    RandomSource root(model_seed);

    for (int ctx = 0; ctx < rows; ++ctx) {
        RandomSource rng = root.substream(static_cast<std::uint64_t>(ctx));

        // Logit of token x is perm(x) + jitter in [0, 0.5), so the leading
        // token beats the runner-up by at least 0.5 and softmax(logit / T)
        // collapses to (almost) one-hot as T -> 0.
        std::vector<int> perm(static_cast<size_t>(vocab_size));
        for (int x = 0; x < vocab_size; ++x) {
            perm[static_cast<size_t>(x)] = x;
        }
        for (int x = vocab_size - 1; x > 0; --x) {
            const int j = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(x + 1));
            std::swap(perm[static_cast<size_t>(x)], perm[static_cast<size_t>(j)]);
        }

        std::vector<double> logits(static_cast<size_t>(vocab_size));
        for (int x = 0; x < vocab_size; ++x) {
            logits[static_cast<size_t>(x)] = perm[static_cast<size_t>(x)] + 0.5 * rng.next_unit();
        }

        const double        top = *std::max_element(logits.begin(), logits.end());
        std::vector<double> mass(static_cast<size_t>(vocab_size));
        double              total = 0.0;
        for (int x = 0; x < vocab_size; ++x) {
            mass[static_cast<size_t>(x)] = std::exp((logits[static_cast<size_t>(x)] - top) / temperature);
            total += mass[static_cast<size_t>(x)];
        }
        for (double & m : mass) {
            m /= total;
        }
        table.emplace_back(std::move(mass));
    }
    return ToyMarkovModel(model_seed, vocab_size, shape, temperature, std::move(table));
}

ToyMarkovModel derive_drafter(const ToyMarkovModel & target, int r, double noise,
                              std::uint64_t drafter_seed) {
    if (r < 1) {
        throw ParamError("derive_drafter needs r >= 1");
    }
    const GridShape shape = target.grid_shape();
    if (shape.height % r != 0 || shape.width % r != 0) {
        throw ParamError("target shape is not divisible by the resolution ratio");
    }
    if (noise < 0.0 || noise > 1.0) {
        throw ParamError("derive_drafter needs noise in [0, 1]");
    }

    const int    vocab   = target.vocab_size();
    const double uniform = 1.0 / vocab;

    std::vector<Categorical> table;
    table.reserve(static_cast<size_t>(target.context_count()));
    for (VocabId left = 0; left <= vocab; ++left) {
        for (VocabId above = 0; above <= vocab; ++above) {
            for (VocabId cond = 0; cond < vocab; ++cond) {
                const Categorical & p = target.row(left, above, cond);
                std::vector<double> mass(static_cast<size_t>(vocab));
                for (int x = 0; x < vocab; ++x) {
                    mass[static_cast<size_t>(x)] = (1.0 - noise) * p.mass[static_cast<size_t>(x)] +
                                                   noise * uniform;
                }
                table.emplace_back(std::move(mass));
            }
        }
    }
    return ToyMarkovModel(drafter_seed, vocab, GridShape{ shape.height / r, shape.width / r },
                          target.temperature(), std::move(table));
}

namespace {

std::string header_value(const std::string & line, const std::string & key,
                         const std::string & path) {
    if (line.rfind(key + "=", 0) != 0) {
        throw IoError("expected '" + key + "=' line in " + path);
    }
    return line.substr(key.size() + 1);
}

}  // namespace

void save_toy_model(const std::string & path, const ToyMarkovModel & model) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open for writing: " + path);
    }
    const int vocab = model.vocab_size();
    out << "toy-markov-v1\n";
    out << "vocab=" << vocab << "\n";
    out << "height=" << model.grid_shape().height << "\n";
    out << "width=" << model.grid_shape().width << "\n";
    out << "temperature=" << format_double(model.temperature()) << "\n";
    out << "seed=" << model.seed() << "\n";
    for (VocabId left = 0; left <= vocab; ++left) {
        for (VocabId above = 0; above <= vocab; ++above) {
            for (VocabId cond = 0; cond < vocab; ++cond) {
                out << left << "," << above << "," << cond << ":";
                const Categorical & row = model.row(left, above, cond);
                for (int x = 0; x < vocab; ++x) {
                    out << (x ? "," : "") << format_double(row.mass[static_cast<size_t>(x)]);
                }
                out << "\n";
            }
        }
    }
    if (!out) {
        throw IoError("write failed: " + path);
    }
}

ToyMarkovModel load_toy_model(const std::string & path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open for reading: " + path);
    }
    std::string line;
    if (!std::getline(in, line) || line != "toy-markov-v1") {
        throw IoError("bad toy model magic in " + path);
    }
    std::getline(in, line);
    const int vocab = std::stoi(header_value(line, "vocab", path));
    std::getline(in, line);
    const int height = std::stoi(header_value(line, "height", path));
    std::getline(in, line);
    const int width = std::stoi(header_value(line, "width", path));
    std::getline(in, line);
    const double temperature = parse_double(header_value(line, "temperature", path));
    std::getline(in, line);
    const std::uint64_t seed = std::stoull(header_value(line, "seed", path));

    const int                rows = (vocab + 1) * (vocab + 1) * vocab;
    std::vector<Categorical> table(static_cast<size_t>(rows));
    int                      seen = 0;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const size_t colon = line.find(':');
        if (colon == std::string::npos) {
            throw IoError("bad table row in " + path);
        }
        std::istringstream ctx(line.substr(0, colon));
        std::string        field;
        std::getline(ctx, field, ',');
        const VocabId left = std::stoi(field);
        std::getline(ctx, field, ',');
        const VocabId above = std::stoi(field);
        std::getline(ctx, field, ',');
        const VocabId cond = std::stoi(field);
        check_context(vocab, left, above, cond);

        std::vector<double> mass;
        mass.reserve(static_cast<size_t>(vocab));
        std::istringstream vals(line.substr(colon + 1));
        while (std::getline(vals, field, ',')) {
            mass.push_back(parse_double(field));
        }
        if (static_cast<int>(mass.size()) != vocab) {
            throw IoError("table row width does not match vocab in " + path);
        }
        table[static_cast<size_t>(context_index(vocab, left, above, cond))] =
            Categorical(std::move(mass));
        ++seen;
    }
    if (seen != rows) {
        throw IoError("toy model table is incomplete in " + path);
    }
    return ToyMarkovModel(seed, vocab, GridShape{ height, width }, temperature, std::move(table));
}

// ---------------------------------------------------------------------------
// Block sampler
// ---------------------------------------------------------------------------

ToyBlockSampler::ToyBlockSampler(int factor, Codebook codebook,
                                 std::vector<std::vector<VocabId>> templates)
    : factor_(factor), codebook_(std::move(codebook)), templates_(std::move(templates)) {
    if (factor_ < 1) {
        throw ParamError("block sampler factor must be >= 1");
    }
    if (static_cast<int>(templates_.size()) != codebook_.size()) {
        throw ParamError("block sampler needs one template per codebook token");
    }
    const size_t block = static_cast<size_t>(factor_) * factor_;
    for (const auto & tmpl : templates_) {
        if (tmpl.size() != block) {
            throw ParamError("block template has wrong size");
        }
        for (VocabId tok : tmpl) {
            if (tok < 0 || tok >= codebook_.size()) {
                throw ParamError("block template token out of range");
            }
        }
    }
    for (size_t a = 0; a < templates_.size(); ++a) {
        for (size_t b = a + 1; b < templates_.size(); ++b) {
            if (templates_[a] == templates_[b]) {
                throw ParamError("block templates must be mutually distinct");
            }
        }
    }
}

std::vector<VocabId> ToyBlockSampler::apply(const std::vector<VocabId> & low_rows, int low_width,
                                            const TokenGrid & /*high_context*/) const {
    // The template expansion is context-free; the finalized high-res prefix
    // is accepted for interface compatibility and ignored.
    const int            r          = factor_;
    const int            high_width = low_width * r;
    const int            low_height = static_cast<int>(low_rows.size()) / low_width;
    std::vector<VocabId> out(static_cast<size_t>(low_rows.size()) * r * r);
    for (int b = 0; b < low_height; ++b) {
        for (int j = 0; j < low_width; ++j) {
            const auto & tmpl = templates_[static_cast<size_t>(
                low_rows[static_cast<size_t>(b * low_width + j)])];
            for (int s = 0; s < r; ++s) {
                for (int c = 0; c < r; ++c) {
                    out[static_cast<size_t>((b * r + s) * high_width + j * r + c)] =
                        tmpl[static_cast<size_t>(s * r + c)];
                }
            }
        }
    }
    return out;
}

VocabId ToyBlockSampler::nearest_template(const std::vector<VocabId> & block) const {
    if (block.size() != static_cast<size_t>(factor_) * factor_) {
        throw ParamError("block has wrong size for this factor");
    }
    VocabId best      = 0;
    double  best_dist = std::numeric_limits<double>::infinity();
    for (VocabId id = 0; id < vocab_size(); ++id) {
        const auto & tmpl = templates_[static_cast<size_t>(id)];
        double       acc  = 0.0;
        for (size_t cell = 0; cell < block.size(); ++cell) {
            acc += codebook_distance_sq(codebook_, block[cell], tmpl[cell]);
        }
        if (acc < best_dist) {  // strict: ties keep the lowest id
            best_dist = acc;
            best      = id;
        }
    }
    return best;
}

std::vector<VocabId> ToyBlockSampler::apply(const std::vector<VocabId> & high_block_rows,
                                            int high_width) const {
    const int            r         = factor_;
    const int            low_width = high_width / r;
    std::vector<VocabId> out(static_cast<size_t>(low_width));
    std::vector<VocabId> block(static_cast<size_t>(r) * r);
    for (int j = 0; j < low_width; ++j) {
        for (int s = 0; s < r; ++s) {
            for (int c = 0; c < r; ++c) {
                block[static_cast<size_t>(s * r + c)] =
                    high_block_rows[static_cast<size_t>(s * high_width + j * r + c)];
            }
        }
        out[static_cast<size_t>(j)] = nearest_template(block);
    }
    return out;
}

bool ToyBlockSampler::operator==(const ToyBlockSampler & other) const {
    return factor_ == other.factor_ && codebook_.dim == other.codebook_.dim &&
           codebook_.data == other.codebook_.data && templates_ == other.templates_;
}

ToyBlockSampler build_block_sampler(std::uint64_t sampler_seed, const Codebook & codebook,
                                    int factor) {
    if (factor < 1) {
        throw ParamError("build_block_sampler needs factor >= 1");
    }
    const int vocab = codebook.size();
    const int cells = factor * factor;
    if (factor == 1 && vocab < 1) {
        throw ParamError("cannot build distinct templates");
    }

    RandomSource rng(sampler_seed);
    std::vector<std::vector<VocabId>> templates;
    templates.reserve(static_cast<size_t>(vocab));
    for (VocabId id = 0; id < vocab; ++id) {
        while (true) {
            std::vector<VocabId> tmpl(static_cast<size_t>(cells));
            if (factor == 1) {
                // Identity is the only family of V distinct 1x1 templates.
                tmpl[0] = id;
            } else {
                for (VocabId & tok : tmpl) {
                    tok = static_cast<VocabId>(rng.next_u64() % static_cast<std::uint64_t>(vocab));
                }
            }
            if (std::find(templates.begin(), templates.end(), tmpl) == templates.end()) {
                templates.push_back(std::move(tmpl));
                break;
            }
        }
    }
    return ToyBlockSampler(factor, codebook, std::move(templates));
}

void save_block_samplers(const std::string & path, const std::vector<ToyBlockSampler> & samplers) {
    if (samplers.empty()) {
        throw ParamError("nothing to save");
    }
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open for writing: " + path);
    }
    out << "block-templates-v1\n";
    out << "vocab=" << samplers.front().vocab_size() << "\n";
    for (const ToyBlockSampler & sampler : samplers) {
        out << "factor=" << sampler.factor() << "\n";
        for (VocabId id = 0; id < sampler.vocab_size(); ++id) {
            out << id << ":";
            const auto & tmpl = sampler.block_template(id);
            for (size_t cell = 0; cell < tmpl.size(); ++cell) {
                out << (cell ? "," : "") << tmpl[cell];
            }
            out << "\n";
        }
    }
    if (!out) {
        throw IoError("write failed: " + path);
    }
}

std::vector<ToyBlockSampler> load_block_samplers(const std::string & path,
                                                 const Codebook &    codebook) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open for reading: " + path);
    }
    std::string line;
    if (!std::getline(in, line) || line != "block-templates-v1") {
        throw IoError("bad block template magic in " + path);
    }
    std::getline(in, line);
    const int vocab = std::stoi(header_value(line, "vocab", path));
    if (vocab != codebook.size()) {
        throw IoError("block template vocab does not match codebook in " + path);
    }

    std::vector<ToyBlockSampler>      samplers;
    int                               factor = 0;
    std::vector<std::vector<VocabId>> templates;
    auto flush = [&]() {
        if (factor > 0) {
            samplers.emplace_back(factor, codebook, std::move(templates));
            templates.clear();
        }
    };
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        if (line.rfind("factor=", 0) == 0) {
            flush();
            factor = std::stoi(line.substr(7));
            continue;
        }
        const size_t colon = line.find(':');
        if (colon == std::string::npos || factor == 0) {
            throw IoError("bad block template row in " + path);
        }
        if (std::stoi(line.substr(0, colon)) != static_cast<int>(templates.size())) {
            throw IoError("block template rows must appear in ascending id order: " + path);
        }
        std::vector<VocabId> tmpl;
        std::istringstream   vals(line.substr(colon + 1));
        std::string          field;
        while (std::getline(vals, field, ',')) {
            tmpl.push_back(std::stoi(field));
        }
        templates.push_back(std::move(tmpl));
    }
    flush();
    if (samplers.empty()) {
        throw IoError("no block template sections in " + path);
    }
    return samplers;
}

// ---------------------------------------------------------------------------
// Validated operations
// ---------------------------------------------------------------------------

std::vector<VocabId> up_sample(const Upsampler & sampler, const std::vector<VocabId> & low_rows,
                               int low_width, const TokenGrid & high_context) {
    if (low_width < 1) {
        throw ParamError("up_sample needs low_width >= 1");
    }
    if (low_rows.empty()) {
        throw ContractError("up_sample needs at least one complete low-res row");
    }
    if (low_rows.size() % static_cast<size_t>(low_width) != 0) {
        throw ContractError("up_sample input must be complete low-res rows");
    }
    const int r = sampler.factor();
    std::vector<VocabId> out = sampler.apply(low_rows, low_width, high_context);
    if (out.size() != low_rows.size() * static_cast<size_t>(r) * r) {
        throw ContractError("upsampler produced the wrong number of tokens");
    }
    return out;
}

std::vector<VocabId> down_sample(const Downsampler & sampler,
                                 const std::vector<VocabId> & high_rows, int high_width) {
    const int r = sampler.factor();
    if (high_width < 1 || high_width % r != 0) {
        throw ParamError("down_sample needs high_width divisible by the factor");
    }
    if (high_rows.empty() || high_rows.size() % (static_cast<size_t>(high_width) * r) != 0) {
        throw ContractError("down_sample input must be a non-empty multiple of r complete rows");
    }
    const size_t         group = static_cast<size_t>(high_width) * r;
    std::vector<VocabId> out;
    out.reserve(high_rows.size() / (static_cast<size_t>(r) * r));
    for (size_t start = 0; start < high_rows.size(); start += group) {
        std::vector<VocabId> rows(high_rows.begin() + static_cast<std::ptrdiff_t>(start),
                                  high_rows.begin() + static_cast<std::ptrdiff_t>(start + group));
        std::vector<VocabId> low = sampler.apply(rows, high_width);
        if (low.size() != static_cast<size_t>(high_width / r)) {
            throw ContractError("downsampler produced the wrong number of tokens");
        }
        out.insert(out.end(), low.begin(), low.end());
    }
    return out;
}

}  // namespace specgrid
