// csv.hpp : small RFC-4180-ish CSV helpers shared by the log and dataset I/O.

#pragma once

#include <charconv>
#include <string>
#include <string_view>
#include <vector>

namespace aifml::detail {

// Quotes a field when it contains a comma, quote or newline.
inline std::string csv_field(std::string_view raw) {
  if (raw.find_first_of(",\"\n") == std::string_view::npos) return std::string(raw);
  std::string out = "\"";
  for (const char c : raw) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += '"';
  return out;
}

// Shortest representation that parses back to the same double.
inline std::string csv_number(double value) {
  char buffer[32];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

// Splits into records of fields, honoring quoted fields with doubled quotes.
// Throws std::runtime_error on an unterminated quote.
inline std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> fields;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;

  const auto end_field = [&] {
    fields.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  const auto end_record = [&] {
    if (field_started || !field.empty() || !fields.empty()) {
      end_field();
      records.push_back(std::move(fields));
      fields.clear();
    }
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        field_started = true;
        end_field();
        field_started = true;  // the next field exists even if empty
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) throw std::runtime_error("unterminated quoted CSV field");
  end_record();
  return records;
}

}  // namespace aifml::detail
