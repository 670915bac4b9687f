#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace offlang::utf8 {

/// Decodes UTF-8 into scalar values. Malformed sequences decode to U+FFFD one
/// byte at a time so that decoding never fails.
std::u32string decode(std::string_view text);

void append(std::string& out, char32_t cp);
std::string encode(std::u32string_view text);

/// Byte offset of every scalar value start, plus a final entry equal to
/// text.size(). Uses the same malformed-byte policy as decode().
std::vector<std::size_t> boundaries(std::string_view text);

std::size_t length(std::string_view text);

}  // namespace offlang::utf8
