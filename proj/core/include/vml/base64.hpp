#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace vml {

std::string base64_encode(const std::uint8_t* data, std::size_t len);
std::vector<std::uint8_t> base64_decode(const std::string& text);

// Little-endian packed doubles, the payload format for gridded densities.
std::string encode_doubles(const std::vector<double>& values);
std::vector<double> decode_doubles(const std::string& text);

}  // namespace vml
