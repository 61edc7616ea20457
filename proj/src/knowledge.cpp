#include "coknow/knowledge.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "coknow/prompting.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace coknow {

using nlohmann::json;

KnowledgeKind knowledge_kind_from_string(const std::string& s) {
    if (s == "vk" || s == "VK") return KnowledgeKind::VK;
    if (s == "nvk" || s == "NVK") return KnowledgeKind::NVK;
    if (s == "pk" || s == "PK") return KnowledgeKind::PK;
    throw InputError("unknown knowledge kind: " + s);
}

std::string to_string(KnowledgeKind k) {
    switch (k) {
    case KnowledgeKind::VK: return "vk";
    case KnowledgeKind::NVK: return "nvk";
    case KnowledgeKind::PK: return "pk";
    }
    return "pk";
}

std::string to_string(KnowledgeOrigin o) {
    switch (o) {
    case KnowledgeOrigin::Llm: return "llm";
    case KnowledgeOrigin::Fixture: return "fixture";
    case KnowledgeOrigin::Manual: return "manual";
    }
    return "manual";
}

KnowledgeOrigin knowledge_origin_from_string(const std::string& s) {
    if (s == "llm") return KnowledgeOrigin::Llm;
    if (s == "fixture") return KnowledgeOrigin::Fixture;
    if (s == "manual") return KnowledgeOrigin::Manual;
    throw InputError("unknown knowledge source: " + s);
}

const std::string& KnowledgeEntry::text(KnowledgeKind kind) const {
    switch (kind) {
    case KnowledgeKind::VK: return vk;
    case KnowledgeKind::NVK: return nvk;
    case KnowledgeKind::PK: return pk;
    }
    return pk;
}

std::string KnowledgeBank::to_json_string() const {
    json entries_json = json::object();
    for (const auto& [name, entry] : entries) {
        entries_json[name] = {
            {"vk", entry.vk},
            {"nvk", entry.nvk},
            {"pk", entry.pk},
            {"source", to_string(entry.source)},
        };
    }
    json doc = {
        {"created_at", created_at},
        {"dataset_id", dataset_id},
        {"model_id", model_id},
        {"entries", entries_json},
    };
    if (incomplete) doc["incomplete"] = true;
    return doc.dump(2) + "\n";
}

KnowledgeBank KnowledgeBank::from_json_string(const std::string& text) {
    json doc = json::parse(text);
    KnowledgeBank bank;
    bank.dataset_id = doc.value("dataset_id", "");
    bank.model_id = doc.value("model_id", "");
    bank.created_at = doc.value("created_at", "");
    bank.incomplete = doc.value("incomplete", false);
    for (const auto& [name, e] : doc.at("entries").items()) {
        KnowledgeEntry entry;
        entry.class_name = name;
        entry.vk = e.at("vk").get<std::string>();
        entry.nvk = e.at("nvk").get<std::string>();
        entry.pk = e.at("pk").get<std::string>();
        entry.source = knowledge_origin_from_string(e.value("source", "manual"));
        entry.model_id = bank.model_id;
        bank.entries.emplace(name, std::move(entry));
    }
    return bank;
}

void KnowledgeBank::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("bank: cannot write " + path.string());
    out << to_json_string();
}

KnowledgeBank KnowledgeBank::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("bank: cannot open " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    try {
        return from_json_string(buffer.str());
    } catch (const json::exception& e) {
        throw IoError("bank: failed to parse " + path.string() + ": " + e.what());
    }
}

std::string render_prompt(const GenPrompt& p, const std::string& class_name) {
    if (class_name.empty()) throw InputError("render_prompt: empty class name");
    return substitute_class(p.template_text, class_name);
}

GenPrompt default_gen_prompt(KnowledgeKind kind) {
    switch (kind) {
    case KnowledgeKind::VK:
        return {kind,
                "Describe the visual appearance of [CLASS] in one sentence of at most 20 words, "
                "covering shape, color, and distinctive parts.",
                20};
    case KnowledgeKind::NVK:
        return {kind,
                "Describe [CLASS] in one sentence of at most 20 words, covering nonvisual aspects "
                "such as behavior, function, or role, not appearance.",
                20};
    case KnowledgeKind::PK:
        return {kind,
                "Describe [CLASS] in one sentence of at most 20 words, combining its visual "
                "appearance with its nonvisual characteristics.",
                20};
    }
    throw InputError("unknown knowledge kind");
}

std::vector<GenPrompt> default_gen_prompts() {
    return {default_gen_prompt(KnowledgeKind::VK), default_gen_prompt(KnowledgeKind::NVK),
            default_gen_prompt(KnowledgeKind::PK)};
}

namespace {

std::string class_slug(const std::string& class_name) {
    std::string slug;
    for (unsigned char c : class_name)
        if (std::isalnum(c)) slug.push_back(static_cast<char>(std::tolower(c)));
    return slug.empty() ? "item" : slug;
}

} // namespace

std::string synthetic_description(KnowledgeKind kind, const std::string& class_name) {
    const std::string slug = class_slug(class_name);
    switch (kind) {
    case KnowledgeKind::VK:
        return "compact body with the distinct visual marker vis" + slug + " and a patterned outline";
    case KnowledgeKind::NVK:
        return "known for the habit nv" + slug + " and a steady predictable routine";
    case KnowledgeKind::PK:
        return "visual marker vis" + slug + " combined with the habit nv" + slug +
               " in one profile";
    }
    return class_name;
}

FetchResult SyntheticFixtureSource::fetch(KnowledgeKind kind, const std::string& class_name,
                                          const std::string&) {
    return {true, synthetic_description(kind, class_name), ""};
}

GenerateResult generate_bank(std::span<const std::string> classes,
                             std::span<const GenPrompt> prompts, KnowledgeSource& source,
                             const GenerateOptions& options) {
    if (classes.empty()) throw InputError("generate_bank: empty class list");
    for (size_t i = 1; i < classes.size(); ++i)
        for (size_t j = 0; j < i; ++j)
            if (classes[i] == classes[j])
                throw InputError("generate_bank: duplicate class \"" + classes[i] + "\"");
    if (prompts.size() != 3) throw InputError("generate_bank: need one prompt per knowledge kind");

    struct Slot {
        KnowledgeEntry entry;
        std::vector<std::string> errors;
    };
    std::vector<Slot> slots(classes.size());

    const int attempts = std::max(1, options.attempts_per_item);
    const long long n = static_cast<long long>(classes.size());

#ifdef _OPENMP
    const int threads = std::clamp(options.concurrency, 1, 64);
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
    for (long long idx = 0; idx < n; ++idx) {
        const std::string& cls = classes[static_cast<size_t>(idx)];
        Slot& slot = slots[static_cast<size_t>(idx)];
        slot.entry.class_name = cls;
        slot.entry.source = source.origin();
        slot.entry.model_id = source.model_id();
        for (const GenPrompt& prompt : prompts) {
            const std::string rendered = render_prompt(prompt, cls);
            FetchResult result;
            for (int attempt = 0; attempt < attempts; ++attempt) {
                result = source.fetch(prompt.kind, cls, rendered);
                if (result.ok) break;
            }
            if (!result.ok) {
                slot.errors.push_back(cls + "/" + to_string(prompt.kind) + ": " + result.error);
                continue;
            }
            std::string text = result.text;
            if (text.size() > kMaxDescriptionChars) text.resize(kMaxDescriptionChars);
            switch (prompt.kind) {
            case KnowledgeKind::VK: slot.entry.vk = text; break;
            case KnowledgeKind::NVK: slot.entry.nvk = text; break;
            case KnowledgeKind::PK: slot.entry.pk = text; break;
            }
        }
    }

    GenerateResult result;
    result.bank.dataset_id = options.dataset_id;
    result.bank.model_id = source.model_id();
    for (auto& slot : slots) {
        for (auto& err : slot.errors) result.failures.push_back(std::move(err));
        if (!slot.entry.vk.empty() && !slot.entry.nvk.empty() && !slot.entry.pk.empty())
            result.bank.entries.emplace(slot.entry.class_name, std::move(slot.entry));
    }
    result.bank.incomplete = result.bank.entries.size() != classes.size();
    return result;
}

ValidationReport validate_bank(const KnowledgeBank& bank, std::span<const std::string> classes) {
    ValidationReport report;
    for (const auto& cls : classes)
        if (!bank.entries.count(cls))
            report.violations.push_back("missing entry for class \"" + cls + "\"");

    for (const auto& [name, entry] : bank.entries) {
        for (KnowledgeKind kind : {KnowledgeKind::VK, KnowledgeKind::NVK, KnowledgeKind::PK}) {
            const std::string& text = entry.text(kind);
            if (text.empty())
                report.violations.push_back("empty " + to_string(kind) + " for class \"" + name + "\"");
            else if (text.size() > kMaxDescriptionChars)
                report.violations.push_back(to_string(kind) + " for class \"" + name + "\" exceeds " +
                                            std::to_string(kMaxDescriptionChars) + " characters");
        }
    }

    // identical text across classes is suspicious but not fatal
    for (KnowledgeKind kind : {KnowledgeKind::VK, KnowledgeKind::NVK, KnowledgeKind::PK}) {
        std::map<std::string, std::string> seen;
        for (const auto& [name, entry] : bank.entries) {
            const std::string& text = entry.text(kind);
            if (text.empty()) continue;
            auto [it, inserted] = seen.emplace(text, name);
            if (!inserted)
                report.warnings.push_back("classes \"" + it->second + "\" and \"" + name +
                                          "\" share identical " + to_string(kind) + " text");
        }
    }
    return report;
}

EmbeddedBank embed_bank(const KnowledgeBank& bank, std::span<const std::string> classes,
                        KnowledgeKind kind, const Vocabulary& vocab,
                        const TextEncoderParams& params) {
    EmbeddedBank out;
    out.rows = Tensor2(classes.size(), params.dims.d_joint);
    for (size_t i = 0; i < classes.size(); ++i) {
        auto it = bank.entries.find(classes[i]);
        if (it == bank.entries.end())
            throw ProtocolError("embed_bank: bank has no entry for class \"" + classes[i] + "\"");
        const TokenSequence seq = tokenize(it->second.text(kind), vocab, params.dims.max_len);
        const size_t tokens = seq.token_count();
        if (tokens > 0 && 2 * seq.unk_count() >= tokens)
            out.warnings.push_back("class \"" + classes[i] + "\": " + std::to_string(seq.unk_count()) +
                                   "/" + std::to_string(tokens) + " tokens unknown");
        out.rows.set_row(i, encode_text(seq, params).v);
    }
    return out;
}

} // namespace coknow
