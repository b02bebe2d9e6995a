#pragma once

#include "spikefed/data/dataset.hpp"
#include "spikefed/numerics/parameter_set.hpp"

#include <optional>
#include <string>
#include <tuple>
#include <type_traits>
#include <utility>
#include <vector>

namespace spikefed::testing {

// Privacy by construction: walk the fields of every message type that crosses
// the client/server boundary and require that each one is a scalar, a string,
// a numerics::ParameterSet, or an aggregate / container built only from those.

namespace reflect {

struct Any {
    template <class T>
    operator T() const;
};

template <class T, std::size_t... I>
constexpr bool constructible_with(std::index_sequence<I...>) {
    return requires { T{(static_cast<void>(I), Any{})...}; };
}

template <class T, std::size_t N = 0>
constexpr std::size_t field_count() {
    if constexpr (N > 12)
        return N;
    else if constexpr (constructible_with<T>(std::make_index_sequence<N + 1>{}))
        return field_count<T, N + 1>();
    else
        return N;
}

template <class T>
constexpr auto field_types() {
    constexpr auto count = field_count<T>();
    T* p = nullptr;
    if constexpr (count == 1) {
        auto& [a] = *p;
        return std::type_identity<std::tuple<std::remove_cvref_t<decltype(a)>>>{};
    } else if constexpr (count == 2) {
        auto& [a, b] = *p;
        return std::type_identity<std::tuple<std::remove_cvref_t<decltype(a)>, std::remove_cvref_t<decltype(b)>>>{};
    } else if constexpr (count == 4) {
        auto& [a, b, c, d] = *p;
        return std::type_identity<std::tuple<std::remove_cvref_t<decltype(a)>, std::remove_cvref_t<decltype(b)>,
                                             std::remove_cvref_t<decltype(c)>, std::remove_cvref_t<decltype(d)>>>{};
    } else if constexpr (count == 6) {
        auto& [a, b, c, d, e, f] = *p;
        return std::type_identity<std::tuple<std::remove_cvref_t<decltype(a)>, std::remove_cvref_t<decltype(b)>,
                                             std::remove_cvref_t<decltype(c)>, std::remove_cvref_t<decltype(d)>,
                                             std::remove_cvref_t<decltype(e)>, std::remove_cvref_t<decltype(f)>>>{};
    } else {
        static_assert(count == 1, "extend field_types for this field count");
    }
}

template <class T>
constexpr bool payload_ok();

template <class Tuple>
struct all_ok;
template <class... Ts>
struct all_ok<std::tuple<Ts...>> : std::bool_constant<(payload_ok<Ts>() && ...)> {};

template <class T>
struct is_vector : std::false_type {};
template <class U>
struct is_vector<std::vector<U>> : std::true_type {};
template <class T>
struct is_optional : std::false_type {};
template <class U>
struct is_optional<std::optional<U>> : std::true_type {};

template <class T>
constexpr bool payload_ok() {
    if constexpr (std::is_same_v<T, data::LabeledExample>)
        return false;
    else if constexpr (std::is_arithmetic_v<T> || std::is_enum_v<T> || std::is_same_v<T, std::string> ||
                       std::is_same_v<T, numerics::ParameterSet>)
        return true;
    else if constexpr (is_vector<T>::value || is_optional<T>::value)
        return payload_ok<typename T::value_type>();
    else if constexpr (std::is_aggregate_v<T>)
        return all_ok<typename decltype(field_types<T>())::type>::value;
    else
        return false;  // pointers, spans, references and opaque classes could smuggle data
}

}  // namespace reflect

}  // namespace spikefed::testing
