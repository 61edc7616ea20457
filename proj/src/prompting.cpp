#include "coknow/prompting.hpp"

#include "coknow/rng.hpp"

namespace coknow {

namespace {

constexpr const char* kPlaceholder = "[CLASS]";

size_t placeholder_count(const std::string& pattern) {
    size_t count = 0;
    for (size_t pos = pattern.find(kPlaceholder); pos != std::string::npos;
         pos = pattern.find(kPlaceholder, pos + 1))
        ++count;
    return count;
}

} // namespace

ClassPosition class_position_from_string(const std::string& s) {
    if (s == "end" || s == "End") return ClassPosition::End;
    if (s == "middle" || s == "Middle") return ClassPosition::Middle;
    throw InputError("unknown class position: " + s);
}

std::string to_string(ClassPosition p) {
    return p == ClassPosition::End ? "end" : "middle";
}

SoftPrompt init_context(size_t m, size_t d_model, uint64_t seed, double stddev,
                        ClassPosition position) {
    if (m == 0) throw InputError("init_context: context length must be >= 1");
    Rng rng(seed);
    Tensor2 ctx(m, d_model);
    for (double& v : ctx.data) v = stddev * rng.next_gaussian();
    SoftPrompt prompt{Param(std::move(ctx)), position};
    return prompt;
}

std::string substitute_class(const std::string& pattern, const std::string& class_name) {
    if (placeholder_count(pattern) != 1)
        throw InputError("template must contain exactly one " + std::string(kPlaceholder) + ": \"" +
                         pattern + "\"");
    std::string out = pattern;
    out.replace(out.find(kPlaceholder), std::string(kPlaceholder).size(), class_name);
    return out;
}

std::vector<std::string> expand_handcrafted(const HandcraftedTemplate& t,
                                            std::span<const std::string> classes) {
    std::vector<std::string> out;
    out.reserve(classes.size());
    for (const auto& cls : classes) out.push_back(substitute_class(t.pattern, cls));
    return out;
}

AssembledPrompt assemble_soft_sequence(const SoftPrompt& prompt, std::span<const int> class_token_ids,
                                       size_t max_len) {
    if (class_token_ids.empty()) throw InputError("assemble_soft_sequence: no class tokens");
    const size_t m = prompt.length();
    const size_t total = m + class_token_ids.size();
    if (total > max_len)
        throw InputError("assemble_soft_sequence: sequence length " + std::to_string(total) +
                         " exceeds max_len " + std::to_string(max_len));

    AssembledPrompt out;
    out.seq.items.reserve(total);

    auto push_context = [&](size_t row) {
        out.context_slots.emplace_back(out.seq.items.size(), row);
        out.seq.items.push_back(SeqItem::raw(prompt.context.value.row_copy(row)));
    };
    auto push_tokens = [&] {
        for (int id : class_token_ids) out.seq.items.push_back(SeqItem::token(id));
    };

    if (prompt.position == ClassPosition::End) {
        for (size_t row = 0; row < m; ++row) push_context(row);
        push_tokens();
    } else {
        const size_t head = (m + 1) / 2; // odd M keeps the extra vector before the class tokens
        for (size_t row = 0; row < head; ++row) push_context(row);
        push_tokens();
        for (size_t row = head; row < m; ++row) push_context(row);
    }
    return out;
}

} // namespace coknow
