// Copyright (c) 2026 The citebench Authors. All Rights Reserved
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace citebench {

/// The 19 MAG scientific fields, in the column order used by field-level tables.
enum class Field : std::uint8_t {
  Art,
  Biology,
  Business,
  Chemistry,
  ComputerScience,
  Economics,
  Engineering,
  EnvironmentalScience,
  Geography,
  Geology,
  History,
  MaterialsScience,
  Mathematics,
  Medicine,
  Philosophy,
  Physics,
  PoliticalScience,
  Psychology,
  Sociology,
};

inline constexpr std::size_t kFieldCount = 19;

struct FieldInfo {
  Field field;
  std::string_view name;
  std::string_view abbreviation;
};

inline constexpr std::array<FieldInfo, kFieldCount> kFields{{
    {Field::Art, "Art", "Art"},
    {Field::Biology, "Biology", "Bio"},
    {Field::Business, "Business", "Bus"},
    {Field::Chemistry, "Chemistry", "Ch"},
    {Field::ComputerScience, "Computer Science", "CS"},
    {Field::Economics, "Economics", "Eco"},
    {Field::Engineering, "Engineering", "Eng"},
    {Field::EnvironmentalScience, "Environmental Science", "ES"},
    {Field::Geography, "Geography", "Geog"},
    {Field::Geology, "Geology", "Geol"},
    {Field::History, "History", "His"},
    {Field::MaterialsScience, "Materials Science", "MS"},
    {Field::Mathematics, "Mathematics", "Mat"},
    {Field::Medicine, "Medicine", "Med"},
    {Field::Philosophy, "Philosophy", "Phi"},
    {Field::Physics, "Physics", "Phy"},
    {Field::PoliticalScience, "Political Science", "PS"},
    {Field::Psychology, "Psychology", "Psy"},
    {Field::Sociology, "Sociology", "Soc"},
}};

constexpr std::string_view field_name(Field f) {
  return kFields[static_cast<std::size_t>(f)].name;
}

constexpr std::string_view field_abbreviation(Field f) {
  return kFields[static_cast<std::size_t>(f)].abbreviation;
}

constexpr std::size_t field_index(Field f) { return static_cast<std::size_t>(f); }

/// Accepts either the full field name or its abbreviation (exact match).
constexpr std::optional<Field> parse_field(std::string_view text) {
  for (const auto& info : kFields)
    if (text == info.name || text == info.abbreviation) return info.field;
  return std::nullopt;
}

}  // namespace citebench
