#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "coknow/encoders.hpp"
#include "coknow/tensor.hpp"

namespace coknow {

enum class KnowledgeKind { VK, NVK, PK };

KnowledgeKind knowledge_kind_from_string(const std::string& s);
std::string to_string(KnowledgeKind k);

enum class KnowledgeOrigin { Llm, Fixture, Manual };

std::string to_string(KnowledgeOrigin o);
KnowledgeOrigin knowledge_origin_from_string(const std::string& s);

constexpr size_t kMaxDescriptionChars = 512;

struct KnowledgeEntry {
    std::string class_name;
    std::string vk;
    std::string nvk;
    std::string pk;
    KnowledgeOrigin source = KnowledgeOrigin::Manual;
    std::string model_id;

    const std::string& text(KnowledgeKind kind) const;
};

// One VK/NVK/PK triple per class. Serialized with sorted keys so
// save -> load -> save is byte-identical.
struct KnowledgeBank {
    std::map<std::string, KnowledgeEntry> entries;
    std::string dataset_id;
    std::string model_id;
    std::string created_at; // empty for deterministic fixture banks
    bool incomplete = false;

    size_t description_count() const { return entries.size() * 3; }

    std::string to_json_string() const;
    static KnowledgeBank from_json_string(const std::string& text);
    void save(const std::filesystem::path& path) const;
    static KnowledgeBank load(const std::filesystem::path& path);
};

struct GenPrompt {
    KnowledgeKind kind = KnowledgeKind::PK;
    std::string template_text;
    size_t max_words = 20;
};

// the [CLASS] placeholder substituted, nothing else touched
std::string render_prompt(const GenPrompt& p, const std::string& class_name);

// Default generation prompts. The NVK wording follows the published
// airplane example; VK and PK wordings are this project's own.
GenPrompt default_gen_prompt(KnowledgeKind kind);
std::vector<GenPrompt> default_gen_prompts();

struct FetchResult {
    bool ok = false;
    std::string text;
    std::string error;
};

// Where descriptions come from: a live chat endpoint, a fixture directory,
// or the synthetic generator used by the toy benchmark.
class KnowledgeSource {
public:
    virtual ~KnowledgeSource() = default;
    virtual FetchResult fetch(KnowledgeKind kind, const std::string& class_name,
                              const std::string& rendered_prompt) = 0;
    virtual std::string model_id() const = 0;
    virtual KnowledgeOrigin origin() const = 0;
};

// Deterministic per-class texts: a class-unique marker token plus shared
// descriptor words, so knowledge embeddings correlate with class identity.
class SyntheticFixtureSource : public KnowledgeSource {
public:
    FetchResult fetch(KnowledgeKind kind, const std::string& class_name,
                      const std::string& rendered_prompt) override;
    std::string model_id() const override { return "synthetic-fixture"; }
    KnowledgeOrigin origin() const override { return KnowledgeOrigin::Fixture; }
};

std::string synthetic_description(KnowledgeKind kind, const std::string& class_name);

struct GenerateOptions {
    std::string dataset_id;
    int attempts_per_item = 2;
    int concurrency = 4;
};

struct GenerateResult {
    KnowledgeBank bank;
    std::vector<std::string> failures; // "class/kind: reason"
};

GenerateResult generate_bank(std::span<const std::string> classes,
                             std::span<const GenPrompt> prompts, KnowledgeSource& source,
                             const GenerateOptions& options = {});

struct ValidationReport {
    std::vector<std::string> violations;
    std::vector<std::string> warnings;

    bool ok() const { return violations.empty(); }
};

ValidationReport validate_bank(const KnowledgeBank& bank, std::span<const std::string> classes);

struct EmbeddedBank {
    Tensor2 rows; // class count x d_joint, order = class order
    std::vector<std::string> warnings;
};

EmbeddedBank embed_bank(const KnowledgeBank& bank, std::span<const std::string> classes,
                        KnowledgeKind kind, const Vocabulary& vocab,
                        const TextEncoderParams& params);

} // namespace coknow
