#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace autotest {

// Built-in type validators. Each takes an already-normalized (trimmed,
// lowercased) value and returns true when the value belongs to the type.

bool validate_date(std::string_view v);
bool validate_iso_timestamp(std::string_view v);
bool validate_url(std::string_view v);
bool validate_email(std::string_view v);
bool validate_ipv4(std::string_view v);
bool validate_uuid(std::string_view v);
bool validate_credit_card(std::string_view v);
bool validate_upc_a(std::string_view v);

bool luhn_checksum_ok(std::string_view digits);

using ValidatorFn = bool (*)(std::string_view);

/// The eight registered names, in registration order:
/// date, iso_timestamp, url, email, ipv4, uuid, credit_card, upc_a.
const std::vector<std::string>& validator_names();

/// nullptr for an unknown name.
ValidatorFn find_validator(std::string_view name);

}  // namespace autotest
