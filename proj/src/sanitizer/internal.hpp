#pragma once

#include <string>

namespace silc::detail {

/// Replaces the call token `callee(` at or after column (1-based) with
/// name. Returns false if no such token is there.
bool replace_call_token(std::string& line, int column, const std::string& callee, const std::string& name);

std::string line_at(const std::string& text, int line);

}  // namespace silc::detail
