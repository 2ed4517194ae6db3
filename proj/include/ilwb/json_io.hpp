#pragma once

#include <json.hpp>

#include "ilwb/definability.hpp"
#include "ilwb/groupoid.hpp"
#include "ilwb/interp.hpp"
#include "ilwb/morley.hpp"
#include "ilwb/pretopos.hpp"
#include "ilwb/semantics.hpp"

namespace ilwb {

// Insertion-ordered JSON keeps emitted files byte-stable.
using Json = nlohmann::ordered_json;

Json modelToJson(const FiniteModel& model);
FiniteModel modelFromJson(const Json& j, const Language& language);
Json modelSetToJson(const std::vector<FiniteModel>& models);

Json tupleSetToJson(const TupleSet& set);

Json formulaToJson(const Formula& f);
Formula formulaFromJson(const Json& j, const Language& language);

Json sortToJson(const ImaginarySort& sort);
ImaginarySort sortFromJson(const Json& j, const Language& language);
Json relationToJson(const DefinableRelation& relation);
Json functionToJson(const DefinableFunction& fn);

Json interpretedSortToJson(const InterpretedSort& fiber);

Json sliceToJson(const GroupoidSlice& slice);
Json fiberedSortToJson(const FiberedSort& fs);

Json interpretationToJson(const Interpretation& interp);
Interpretation interpretationFromJson(const Json& j);

Json descriptorToJson(const BorelDescriptor::Ptr& d);
BorelDescriptor::Ptr descriptorFromJson(const Json& j, const Language& language);

Json morleyMapToJson(const MorleyResult& result);

} // namespace ilwb
