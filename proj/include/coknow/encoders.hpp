#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "coknow/tensor.hpp"

namespace coknow {

// Newline-delimited token file, line index = id, lines 0 and 1 reserved
// for <pad> and <unk>.
struct Vocabulary {
    static constexpr int kPad = 0;
    static constexpr int kUnk = 1;

    std::vector<std::string> tokens;
    std::unordered_map<std::string, int> ids;

    static Vocabulary from_tokens(std::vector<std::string> words);
    static Vocabulary from_texts(std::span<const std::string> texts);
    static Vocabulary load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    int id_of(const std::string& token) const;
    size_t size() const { return tokens.size(); }
};

// lowercase, split on whitespace and punctuation
std::vector<std::string> split_words(const std::string& text);

// Sequence item: either a vocabulary token id or a raw embedding vector
// (soft-prompt context rows enter the encoder this way).
struct SeqItem {
    int id = -1;
    std::vector<double> vec;

    bool is_raw() const { return id < 0; }

    static SeqItem token(int token_id) { return SeqItem{token_id, {}}; }
    static SeqItem raw(std::vector<double> v) { return SeqItem{-1, std::move(v)}; }
};

struct TokenSequence {
    std::vector<SeqItem> items;
    bool truncated = false;

    size_t unk_count() const;
    size_t token_count() const;
};

struct EncoderDims {
    size_t d_model = 64;
    size_t d_joint = 64;
    size_t d_in = 64;
    size_t max_len = 32;
};

TokenSequence tokenize(const std::string& text, const Vocabulary& vocab, size_t max_len = 32);

struct Embedding {
    std::vector<double> v;
    bool degenerate = false;
};

// Frozen text tower: embed -> sinusoidal position -> mean pool -> linear ->
// tanh -> linear -> l2 normalize. Reconstructible bit-exactly from
// (seed, dims); nothing here ever receives optimizer updates.
struct TextEncoderParams {
    EncoderDims dims;
    uint64_t seed = 0;
    Tensor2 embed_table; // |V| x d_model
    Tensor2 pos_encoding; // max_len x d_model
    Tensor2 proj_a; // d_model x d_model
    Tensor2 proj_b; // d_model x d_joint

    static TextEncoderParams init(const EncoderDims& dims, size_t vocab_size, uint64_t seed);
};

// per-call cache so the backward pass can reuse forward intermediates
struct TextForwardState {
    size_t len = 0;
    std::vector<double> mean;   // d_model
    std::vector<double> tanh_h; // d_model
    std::vector<double> out;    // d_joint, normalized
    double norm = 0.0;
    bool degenerate = false;
};

Embedding encode_text(const TokenSequence& seq, const TextEncoderParams& params,
                      TextForwardState* state = nullptr);

// Gradient w.r.t. each raw-embedding item; token-id items get an empty
// vector. Frozen tables receive nothing.
std::vector<std::vector<double>> encode_text_backward(const TokenSequence& seq,
                                                      const TextEncoderParams& params,
                                                      const TextForwardState& state,
                                                      std::span<const double> upstream);

struct ImageEncoderParams {
    size_t d_in = 64;
    size_t d_joint = 64;
    uint64_t seed = 0;
    Tensor2 proj; // d_in x d_joint

    static ImageEncoderParams init(size_t d_in, size_t d_joint, uint64_t seed);
};

Embedding encode_image(std::span<const double> x_raw, const ImageEncoderParams& params);

// batch helper: one unit-norm row per input row
Tensor2 encode_images(const Tensor2& x_raw, const ImageEncoderParams& params);

} // namespace coknow
