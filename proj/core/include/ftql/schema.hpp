// Copyright 2026 The FTQL Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FTQL_SCHEMA_HPP_
#define FTQL_SCHEMA_HPP_

#include <string>

#include "json.hpp"

namespace ftql {

// Structural validator for the checked-in artifact schemas. Supports the
// subset actually used there: "type" (object/array/string/number/integer/
// boolean/null), "properties" + "required" + "additionalProperties" (bool),
// "items", and "enum". On failure, *error names the offending JSON path.
bool matches_schema(const nlohmann::json& value, const nlohmann::json& schema,
                    std::string* error = nullptr);

// CSV variant: schema is {"columns": [...]}; checks the header line and that
// every row has the right field count. Fields must be comma-free (writers
// guarantee that).
bool matches_csv_schema(const std::string& csv_text,
                        const nlohmann::json& schema,
                        std::string* error = nullptr);

}  // namespace ftql

#endif  // FTQL_SCHEMA_HPP_
