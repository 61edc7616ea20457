#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "coknow/encoders.hpp"
#include "coknow/tensor.hpp"

namespace coknow {

enum class ClassPosition { End, Middle };

ClassPosition class_position_from_string(const std::string& s);
std::string to_string(ClassPosition p);

// M learnable context vectors shared by every class. The context param is
// the only trainable tensor in this module.
struct SoftPrompt {
    Param context; // M x d_model
    ClassPosition position = ClassPosition::End;

    size_t length() const { return context.value.rows; }
};

SoftPrompt init_context(size_t m, size_t d_model, uint64_t seed, double stddev = 0.02,
                        ClassPosition position = ClassPosition::End);

struct HandcraftedTemplate {
    std::string pattern = "a photo of a [CLASS]";
};

// Substitutes the single [CLASS] placeholder; throws unless exactly one is
// present.
std::string substitute_class(const std::string& pattern, const std::string& class_name);

std::vector<std::string> expand_handcrafted(const HandcraftedTemplate& t,
                                            std::span<const std::string> classes);

// Sequence plus the mapping from raw-item position to context row, used to
// route encoder gradients back onto the shared context.
struct AssembledPrompt {
    TokenSequence seq;
    std::vector<std::pair<size_t, size_t>> context_slots; // (item index, context row)
};

// End:    [v_1 .. v_M, class tokens]
// Middle: [v_1 .. v_ceil(M/2), class tokens, v_ceil(M/2)+1 .. v_M]
AssembledPrompt assemble_soft_sequence(const SoftPrompt& prompt, std::span<const int> class_token_ids,
                                       size_t max_len);

} // namespace coknow
