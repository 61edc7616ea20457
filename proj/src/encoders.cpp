#include "coknow/encoders.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>

#include "coknow/numerics.hpp"
#include "coknow/rng.hpp"

namespace coknow {

namespace {

constexpr const char* kPadToken = "<pad>";
constexpr const char* kUnkToken = "<unk>";

Tensor2 gaussian_tensor(Rng& rng, size_t rows, size_t cols, double stddev) {
    Tensor2 t(rows, cols);
    for (double& v : t.data) v = stddev * rng.next_gaussian();
    return t;
}

Tensor2 sinusoidal_positions(size_t max_len, size_t d_model) {
    Tensor2 pos(max_len, d_model);
    for (size_t p = 0; p < max_len; ++p) {
        for (size_t i = 0; i < d_model; ++i) {
            const double angle =
                static_cast<double>(p) /
                std::pow(10000.0, static_cast<double>(2 * (i / 2)) / static_cast<double>(d_model));
            pos.at(p, i) = (i % 2 == 0) ? std::sin(angle) : std::cos(angle);
        }
    }
    return pos;
}

std::vector<double> normalize_or_flag(std::vector<double> v, double* norm_out, bool* degenerate) {
    double sq = 0.0;
    for (double x : v) sq += x * x;
    const double norm = std::sqrt(sq);
    *norm_out = norm;
    if (norm < 1e-12) {
        *degenerate = true;
        return v;
    }
    *degenerate = false;
    for (double& x : v) x /= norm;
    return v;
}

// y = x * w for row vector x
std::vector<double> row_times(const std::vector<double>& x, const Tensor2& w) {
    std::vector<double> y(w.cols, 0.0);
    for (size_t i = 0; i < w.rows; ++i) {
        const double xi = x[i];
        const double* wrow = w.row(i);
        for (size_t j = 0; j < w.cols; ++j) y[j] += xi * wrow[j];
    }
    return y;
}

// y = g * w^T
std::vector<double> row_times_t(const std::vector<double>& g, const Tensor2& w) {
    std::vector<double> y(w.rows, 0.0);
    for (size_t i = 0; i < w.rows; ++i) {
        const double* wrow = w.row(i);
        double acc = 0.0;
        for (size_t j = 0; j < w.cols; ++j) acc += g[j] * wrow[j];
        y[i] = acc;
    }
    return y;
}

} // namespace

Vocabulary Vocabulary::from_tokens(std::vector<std::string> words) {
    std::sort(words.begin(), words.end());
    words.erase(std::unique(words.begin(), words.end()), words.end());

    Vocabulary vocab;
    vocab.tokens.push_back(kPadToken);
    vocab.tokens.push_back(kUnkToken);
    for (auto& w : words) {
        if (w.empty() || w == kPadToken || w == kUnkToken) continue;
        vocab.tokens.push_back(std::move(w));
    }
    for (size_t i = 0; i < vocab.tokens.size(); ++i)
        vocab.ids[vocab.tokens[i]] = static_cast<int>(i);
    return vocab;
}

Vocabulary Vocabulary::from_texts(std::span<const std::string> texts) {
    std::set<std::string> words;
    for (const auto& text : texts)
        for (auto& w : split_words(text)) words.insert(std::move(w));
    return from_tokens({words.begin(), words.end()});
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("vocabulary: cannot open " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    if (lines.size() < 2 || lines[0] != kPadToken || lines[1] != kUnkToken)
        throw InputError("vocabulary: first two lines must be " + std::string(kPadToken) + ", " +
                         std::string(kUnkToken));
    Vocabulary vocab;
    vocab.tokens = std::move(lines);
    for (size_t i = 0; i < vocab.tokens.size(); ++i)
        vocab.ids[vocab.tokens[i]] = static_cast<int>(i);
    return vocab;
}

void Vocabulary::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("vocabulary: cannot write " + path.string());
    for (const auto& t : tokens) out << t << "\n";
}

int Vocabulary::id_of(const std::string& token) const {
    auto it = ids.find(token);
    return it == ids.end() ? kUnk : it->second;
}

std::vector<std::string> split_words(const std::string& text) {
    std::vector<std::string> words;
    std::string current;
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            current.push_back(static_cast<char>(std::tolower(c)));
        } else if (!current.empty()) {
            words.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) words.push_back(std::move(current));
    return words;
}

size_t TokenSequence::unk_count() const {
    size_t n = 0;
    for (const auto& item : items)
        if (!item.is_raw() && item.id == Vocabulary::kUnk) ++n;
    return n;
}

size_t TokenSequence::token_count() const {
    size_t n = 0;
    for (const auto& item : items)
        if (!item.is_raw()) ++n;
    return n;
}

TokenSequence tokenize(const std::string& text, const Vocabulary& vocab, size_t max_len) {
    TokenSequence seq;
    const auto words = split_words(text);
    if (words.empty()) {
        seq.items.push_back(SeqItem::token(Vocabulary::kPad));
        return seq;
    }
    for (const auto& w : words) {
        if (seq.items.size() == max_len) {
            seq.truncated = true;
            break;
        }
        seq.items.push_back(SeqItem::token(vocab.id_of(w)));
    }
    return seq;
}

TextEncoderParams TextEncoderParams::init(const EncoderDims& dims, size_t vocab_size, uint64_t seed) {
    TextEncoderParams params;
    params.dims = dims;
    params.seed = seed;
    Rng rng(seed);
    const double embed_std = 1.0 / std::sqrt(static_cast<double>(dims.d_model));
    params.embed_table = gaussian_tensor(rng, vocab_size, dims.d_model, embed_std);
    params.pos_encoding = sinusoidal_positions(dims.max_len, dims.d_model);
    params.proj_a =
        gaussian_tensor(rng, dims.d_model, dims.d_model, 1.0 / std::sqrt(static_cast<double>(dims.d_model)));
    params.proj_b =
        gaussian_tensor(rng, dims.d_model, dims.d_joint, 1.0 / std::sqrt(static_cast<double>(dims.d_model)));
    return params;
}

Embedding encode_text(const TokenSequence& seq, const TextEncoderParams& params,
                      TextForwardState* state) {
    if (seq.items.empty()) throw InputError("encode_text: empty sequence");
    if (seq.items.size() > params.dims.max_len)
        throw InputError("encode_text: sequence length " + std::to_string(seq.items.size()) +
                         " exceeds max_len " + std::to_string(params.dims.max_len));

    const size_t d_model = params.dims.d_model;
    const size_t len = seq.items.size();

    std::vector<double> mean(d_model, 0.0);
    for (size_t l = 0; l < len; ++l) {
        const auto& item = seq.items[l];
        const double* pos = params.pos_encoding.row(l);
        if (item.is_raw()) {
            if (item.vec.size() != d_model)
                throw DimensionError("encode_text: raw item length " + std::to_string(item.vec.size()) +
                                     " != d_model " + std::to_string(d_model));
            for (size_t i = 0; i < d_model; ++i) mean[i] += item.vec[i] + pos[i];
        } else {
            const double* emb = params.embed_table.row(static_cast<size_t>(item.id));
            for (size_t i = 0; i < d_model; ++i) mean[i] += emb[i] + pos[i];
        }
    }
    const double inv_len = 1.0 / static_cast<double>(len);
    for (double& v : mean) v *= inv_len;

    std::vector<double> hidden = row_times(mean, params.proj_a);
    for (double& v : hidden) v = std::tanh(v);
    std::vector<double> pre = row_times(hidden, params.proj_b);

    Embedding out;
    double norm = 0.0;
    out.v = normalize_or_flag(std::move(pre), &norm, &out.degenerate);
    ensure_finite(out.v, "encode_text");

    if (state) {
        state->len = len;
        state->mean = mean;
        state->tanh_h = hidden;
        state->out = out.v;
        state->norm = norm;
        state->degenerate = out.degenerate;
    }
    return out;
}

std::vector<std::vector<double>> encode_text_backward(const TokenSequence& seq,
                                                      const TextEncoderParams& params,
                                                      const TextForwardState& state,
                                                      std::span<const double> upstream) {
    const size_t d_joint = params.dims.d_joint;
    if (upstream.size() != d_joint) throw DimensionError("encode_text_backward: upstream size");

    // through the normalization: dz = (g - y (g.y)) / |z|
    std::vector<double> d_pre(d_joint);
    if (state.degenerate) {
        std::copy(upstream.begin(), upstream.end(), d_pre.begin());
    } else {
        double dot = 0.0;
        for (size_t i = 0; i < d_joint; ++i) dot += upstream[i] * state.out[i];
        for (size_t i = 0; i < d_joint; ++i)
            d_pre[i] = (upstream[i] - state.out[i] * dot) / state.norm;
    }

    std::vector<double> d_hidden = row_times_t(d_pre, params.proj_b);
    for (size_t i = 0; i < d_hidden.size(); ++i)
        d_hidden[i] *= 1.0 - state.tanh_h[i] * state.tanh_h[i];
    std::vector<double> d_mean = row_times_t(d_hidden, params.proj_a);

    const double inv_len = 1.0 / static_cast<double>(state.len);
    std::vector<double> d_item(d_mean.size());
    for (size_t i = 0; i < d_mean.size(); ++i) d_item[i] = d_mean[i] * inv_len;

    std::vector<std::vector<double>> grads(seq.items.size());
    for (size_t l = 0; l < seq.items.size(); ++l)
        if (seq.items[l].is_raw()) grads[l] = d_item;
    return grads;
}

ImageEncoderParams ImageEncoderParams::init(size_t d_in, size_t d_joint, uint64_t seed) {
    ImageEncoderParams params;
    params.d_in = d_in;
    params.d_joint = d_joint;
    params.seed = seed;
    Rng rng(seed);
    params.proj = gaussian_tensor(rng, d_in, d_joint, 1.0 / std::sqrt(static_cast<double>(d_in)));
    return params;
}

Embedding encode_image(std::span<const double> x_raw, const ImageEncoderParams& params) {
    if (x_raw.size() != params.d_in)
        throw DimensionError("encode_image: input length " + std::to_string(x_raw.size()) +
                             " != d_in " + std::to_string(params.d_in));
    ensure_finite(x_raw, "encode_image input");

    std::vector<double> pre(params.d_joint, 0.0);
    for (size_t i = 0; i < params.d_in; ++i) {
        const double xi = x_raw[i];
        const double* prow = params.proj.row(i);
        for (size_t j = 0; j < params.d_joint; ++j) pre[j] += xi * prow[j];
    }

    Embedding out;
    double norm = 0.0;
    out.v = normalize_or_flag(std::move(pre), &norm, &out.degenerate);
    ensure_finite(out.v, "encode_image");
    return out;
}

Tensor2 encode_images(const Tensor2& x_raw, const ImageEncoderParams& params) {
    Tensor2 out(x_raw.rows, params.d_joint);
    for (size_t i = 0; i < x_raw.rows; ++i) {
        const Embedding e = encode_image(x_raw.row_span(i), params);
        out.set_row(i, e.v);
    }
    return out;
}

} // namespace coknow
