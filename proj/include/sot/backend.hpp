#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>

#include "sot/strategy.hpp"

namespace sot {

struct BackendConfig {
    std::string id = "default";
    std::string type = "http";  // http | mock-echo-gold | mock-echo-wrong
    std::string endpoint_url;
    std::string model;
    double temperature = 0.0;
    int max_output_tokens = 2048;
    double timeout_s = 120.0;
    int max_retries = 3;
    int requests_per_minute = 0;  // 0 = unlimited
    std::string api_key_env;      // env var holding the bearer token

    bool is_mock() const { return type != "http"; }
    void validate() const;

    static BackendConfig from_json_file(const std::filesystem::path& path);
};

struct Completion {
    std::string text;
    long input_tokens = 0;
    long output_tokens = 0;
    double latency_s = 0.0;
    bool from_cache = false;
    bool usage_estimated = false;

    long total_tokens() const { return input_tokens + output_tokens; }
};

class BackendError : public std::runtime_error {
public:
    BackendError(std::string message, bool transient, int status = 0)
        : std::runtime_error(std::move(message)), transient_(transient), status_(status) {}

    bool transient() const { return transient_; }
    int status() const { return status_; }

private:
    bool transient_;
    int status_;
};

struct CacheKey {
    std::string digest;

    static CacheKey compute(const BackendConfig& config, const PromptBundle& prompt);

    bool operator<(const CacheKey& other) const { return digest < other.digest; }
};

class Backend {
public:
    virtual ~Backend() = default;
    virtual Completion complete(const PromptBundle& prompt) = 0;
    virtual const BackendConfig& config() const = 0;
};

// Runs `attempt` up to max_retries+1 times, backing off exponentially on
// transient BackendErrors. Permanent errors and exhausted retries rethrow.
Completion complete_with_retries(int max_retries, double base_delay_s,
                                 const std::function<Completion()>& attempt,
                                 int* attempts_out = nullptr);

// Minimum-interval limiter; instances are shared per backend id.
class RateLimiter {
public:
    explicit RateLimiter(int requests_per_minute);
    void acquire();

private:
    std::mutex mu_;
    std::chrono::steady_clock::time_point next_;
    std::chrono::duration<double> interval_;
};

RateLimiter& rate_limiter_for(const std::string& backend_id, int requests_per_minute);

// OpenAI-compatible chat-completions client.
class HttpBackend : public Backend {
public:
    explicit HttpBackend(BackendConfig config);

    Completion complete(const PromptBundle& prompt) override;
    const BackendConfig& config() const override { return config_; }

    // Tests shrink the backoff to keep retry paths fast.
    void set_backoff_base(double seconds) { backoff_base_s_ = seconds; }

private:
    Completion attempt_once(const PromptBundle& prompt);

    BackendConfig config_;
    double backoff_base_s_ = 0.25;
};

// Deterministic test double: responses by prompt fingerprint plus an
// optional default rule. Synthetic usage is the whitespace token count and
// latency is fixed.
class ScriptedBackend : public Backend {
public:
    ScriptedBackend();
    explicit ScriptedBackend(BackendConfig config);

    void set_response(const std::string& fingerprint, std::string text);
    void set_default_rule(std::function<std::string(const PromptBundle&)> rule);
    // The next n calls raise a BackendError before producing anything.
    void fail_next(int n, bool transient = true);

    int calls() const;

    Completion complete(const PromptBundle& prompt) override;
    const BackendConfig& config() const override { return config_; }

private:
    mutable std::mutex mu_;
    BackendConfig config_;
    std::map<std::string, std::string> responses_;
    std::function<std::string(const PromptBundle&)> default_rule_;
    int fail_remaining_ = 0;
    bool fail_transient_ = true;
    int calls_ = 0;
};

// Append-only JSONL response cache keyed by CacheKey digest. Corrupt lines
// are skipped with a warning; later entries for a key win.
class ResponseCache {
public:
    explicit ResponseCache(std::filesystem::path file);

    std::optional<Completion> lookup(const CacheKey& key) const;
    void store(const CacheKey& key, const Completion& completion);

    size_t entries() const;
    size_t corrupt_lines() const;
    const std::filesystem::path& path() const { return file_; }

private:
    void load();

    mutable std::mutex mu_;
    std::filesystem::path file_;
    std::map<std::string, Completion> index_;
    size_t corrupt_lines_ = 0;
    bool needs_newline_ = false;  // loaded file ended mid-line
};

// Cache-through completion: hits avoid the backend entirely.
Completion cached_complete(ResponseCache& cache, Backend& backend, const PromptBundle& prompt);

}  // namespace sot
