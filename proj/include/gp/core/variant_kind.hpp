#pragma once

#include <array>
#include <string>
#include <string_view>

namespace gp {

enum class VariantKind { Original, Style, Precision, TextShrink };

inline constexpr std::array<VariantKind, 4> kAllVariants = {
    VariantKind::Original, VariantKind::Style, VariantKind::Precision, VariantKind::TextShrink};

/// Perturbations in report order (baseline excluded).
inline constexpr std::array<VariantKind, 3> kPerturbations = {
    VariantKind::Precision, VariantKind::Style, VariantKind::TextShrink};

std::string_view to_string(VariantKind kind);

/// Accepts "original", "style", "precision", "text_shrink". Throws
/// Error{InvalidArgument} otherwise.
VariantKind parse_variant_kind(std::string_view name);

enum class InstructionType { Direct, Relational };

std::string_view to_string(InstructionType type);
InstructionType parse_instruction_type(std::string_view name);

}  // namespace gp
