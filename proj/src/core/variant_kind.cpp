#include "gp/core/variant_kind.hpp"

#include "gp/core/error.hpp"

namespace gp {

std::string_view to_string(VariantKind kind) {
  switch (kind) {
    case VariantKind::Original: return "original";
    case VariantKind::Style: return "style";
    case VariantKind::Precision: return "precision";
    case VariantKind::TextShrink: return "text_shrink";
  }
  return "original";
}

VariantKind parse_variant_kind(std::string_view name) {
  for (VariantKind kind : kAllVariants) {
    if (to_string(kind) == name) return kind;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown variant '" + std::string(name) + "'");
}

std::string_view to_string(InstructionType type) {
  return type == InstructionType::Direct ? "direct" : "relational";
}

InstructionType parse_instruction_type(std::string_view name) {
  if (name == "direct") return InstructionType::Direct;
  if (name == "relational") return InstructionType::Relational;
  throw Error(ErrorCode::InvalidArgument,
              "unknown instruction type '" + std::string(name) + "'");
}

}  // namespace gp
