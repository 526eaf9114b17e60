#pragma once

#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracbubble/error.hpp"

namespace fbcli {

/// Typed, strict view of one JSON object. Every key read is recorded;
/// finish() rejects keys that no reader asked for, naming the full path.
class ConfigReader {
public:
    ConfigReader(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw fb::DomainError(path_, "expected a JSON object");
    }

    bool has(const std::string& key) {
        used_.insert(key);
        return j_.contains(key) && !j_.at(key).is_null();
    }

    double number(const std::string& key, double fallback) {
        if (!has(key)) return fallback;
        const auto& v = j_.at(key);
        if (!v.is_number()) throw fb::DomainError(field(key), "expected a number");
        return v.get<double>();
    }

    int integer(const std::string& key, int fallback) {
        if (!has(key)) return fallback;
        const auto& v = j_.at(key);
        if (!v.is_number_integer()) throw fb::DomainError(field(key), "expected an integer");
        return v.get<int>();
    }

    bool boolean(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const auto& v = j_.at(key);
        if (!v.is_boolean()) throw fb::DomainError(field(key), "expected true or false");
        return v.get<bool>();
    }

    std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
        if (!has(key)) return fallback;
        const auto& v = j_.at(key);
        if (!v.is_array()) throw fb::DomainError(field(key), "expected an array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) throw fb::DomainError(field(key) + "[" + std::to_string(i) + "]", "expected a number");
            out.push_back(v[i].get<double>());
        }
        return out;
    }

    ConfigReader child(const std::string& key) {
        used_.insert(key);
        static const nlohmann::json empty = nlohmann::json::object();
        if (!j_.contains(key) || j_.at(key).is_null()) return ConfigReader(empty, field(key));
        return ConfigReader(j_.at(key), field(key));
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!used_.count(it.key())) throw fb::DomainError(field(it.key()), "unknown key");
    }

    std::string field(const std::string& key) const { return path_ + "." + key; }

private:
    const nlohmann::json& j_;
    std::string path_;
    std::set<std::string> used_;
};

}  // namespace fbcli
