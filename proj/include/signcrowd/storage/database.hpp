#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

struct sqlite3;
struct sqlite3_stmt;

namespace signcrowd {

class Statement {
public:
    Statement(sqlite3* db, std::string_view sql);
    ~Statement();
    Statement(Statement&& other) noexcept;
    Statement& operator=(Statement&&) = delete;
    Statement(const Statement&) = delete;

    Statement& bind(int index, std::string_view value);
    Statement& bind(int index, const std::string& value) { return bind(index, std::string_view(value)); }
    Statement& bind(int index, const char* value) { return bind(index, std::string_view(value)); }
    Statement& bind(int index, std::int64_t value);
    Statement& bind(int index, int value) { return bind(index, static_cast<std::int64_t>(value)); }
    Statement& bind(int index, double value);
    Statement& bind(int index, std::nullopt_t);
    template <typename T>
    Statement& bind(int index, const std::optional<T>& value) {
        return value ? bind(index, *value) : bind(index, std::nullopt);
    }

    /// Advances; true while a row is available.
    bool step();
    std::int64_t column_int(int col) const;
    double column_double(int col) const;
    std::string column_text(int col) const;
    std::optional<std::string> column_opt_text(int col) const;
    std::optional<std::int64_t> column_opt_int(int col) const;
    bool column_null(int col) const;

private:
    sqlite3* db_;
    sqlite3_stmt* stmt_ = nullptr;
};

class Connection {
public:
    explicit Connection(const std::filesystem::path& path);
    ~Connection();
    Connection(const Connection&) = delete;
    Connection& operator=(const Connection&) = delete;

    void exec(std::string_view sql);
    Statement prepare(std::string_view sql);

    /// Prepares, binds the arguments positionally and runs to completion.
    template <typename... Args>
    int run(std::string_view sql, const Args&... args) {
        auto st = prepare(sql);
        int i = 1;
        (st.bind(i++, args), ...);
        while (st.step()) {
        }
        return changes();
    }

    template <typename... Args>
    Statement query(std::string_view sql, const Args&... args) {
        auto st = prepare(sql);
        int i = 1;
        (st.bind(i++, args), ...);
        return st;
    }

    template <typename... Args>
    std::int64_t scalar_int(std::string_view sql, const Args&... args) {
        auto st = query(sql, args...);
        return st.step() ? st.column_int(0) : 0;
    }

    int changes() const;
    sqlite3* handle() const { return db_; }

    std::function<void(std::string_view)>* statement_hook = nullptr;

private:
    sqlite3* db_ = nullptr;
};

/// SQLite database in WAL mode with a small connection pool. Write transactions
/// are BEGIN IMMEDIATE so read-check-write sequences inside them are atomic.
class Database {
public:
    explicit Database(std::filesystem::path path);
    ~Database();

    template <typename F>
    auto write(F&& fn) {
        auto lease = acquire();
        return in_transaction(*lease, "BEGIN IMMEDIATE", std::forward<F>(fn));
    }

    template <typename F>
    auto read(F&& fn) {
        auto lease = acquire();
        return in_transaction(*lease, "BEGIN", std::forward<F>(fn));
    }

    /// Test hook invoked with the SQL text before each prepared statement.
    void set_statement_hook(std::function<void(std::string_view)> hook);

    const std::filesystem::path& path() const { return path_; }

private:
    struct Release {
        Database* db;
        void operator()(Connection* c) const { db->release(c); }
    };
    using Lease = std::unique_ptr<Connection, Release>;

    Lease acquire();
    void release(Connection* c);
    void begin(Connection& c, const char* mode);

    template <typename F>
    auto in_transaction(Connection& c, const char* mode, F&& fn) {
        begin(c, mode);
        try {
            if constexpr (std::is_void_v<std::invoke_result_t<F, Connection&>>) {
                fn(c);
                c.exec("COMMIT");
            } else {
                auto result = fn(c);
                c.exec("COMMIT");
                return result;
            }
        } catch (...) {
            try {
                c.exec("ROLLBACK");
            } catch (...) {
            }
            throw;
        }
    }

    std::filesystem::path path_;
    std::mutex mutex_;
    std::vector<std::unique_ptr<Connection>> idle_;
    std::function<void(std::string_view)> hook_;
};

}  // namespace signcrowd
