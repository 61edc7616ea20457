#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "coknow/knowledge.hpp"

namespace coknow {

// stable hash for cache/fixture file names
uint64_t fnv1a64(const std::string& text);
std::string cache_key(const std::string& model_id, const std::string& prompt);

// Disk cache of endpoint responses keyed by (model id, rendered prompt).
// Fixture directories use the same layout, so a recorded cache doubles as
// an offline fixture set.
class ResponseCache {
public:
    explicit ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

    std::optional<std::string> lookup(const std::string& model_id, const std::string& prompt) const;
    void store(const std::string& model_id, const std::string& prompt,
               const std::string& response) const;
    std::filesystem::path entry_path(const std::string& model_id, const std::string& prompt) const;

private:
    std::filesystem::path dir_;
};

struct LlmClientConfig {
    std::string endpoint = "http://127.0.0.1:8080/v1/chat/completions";
    std::string model_id = "gpt-4";
    double temperature = 0.0;
    std::string api_key_env = "COKNOW_API_KEY";
    int retries = 3;
    int backoff_ms = 250;
    int timeout_s = 30;
    std::string cache_dir; // empty disables caching
};

// Chat-completions client: POSTs {model, messages, temperature} and reads
// the first choice's message content, with exponential backoff.
class HttpLlmSource : public KnowledgeSource {
public:
    explicit HttpLlmSource(LlmClientConfig cfg);

    FetchResult fetch(KnowledgeKind kind, const std::string& class_name,
                      const std::string& rendered_prompt) override;
    std::string model_id() const override { return cfg_.model_id; }
    KnowledgeOrigin origin() const override { return KnowledgeOrigin::Llm; }

private:
    FetchResult post_once(const std::string& prompt);

    LlmClientConfig cfg_;
    std::optional<ResponseCache> cache_;
    std::string scheme_host_;
    std::string path_;
};

// Offline store: a directory of {model_id, prompt, response} JSON files
// named by cache key. A miss is an explicit error, never a fallback.
class FixtureDirSource : public KnowledgeSource {
public:
    FixtureDirSource(std::filesystem::path dir, std::string model_id);

    FetchResult fetch(KnowledgeKind kind, const std::string& class_name,
                      const std::string& rendered_prompt) override;
    std::string model_id() const override { return model_id_; }
    KnowledgeOrigin origin() const override { return KnowledgeOrigin::Fixture; }

    // helper for building fixture sets in tests and docs
    void put(const std::string& prompt, const std::string& response) const;

private:
    ResponseCache store_;
    std::string model_id_;
};

} // namespace coknow
