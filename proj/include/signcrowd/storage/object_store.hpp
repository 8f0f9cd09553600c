#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "signcrowd/storage/digest.hpp"

namespace signcrowd {

inline constexpr std::size_t kDefaultMaxObjectBytes = std::size_t{512} << 20;

enum class ObjectKind { Video, Keypoints };

/// `videos/<sha256><.webm|.mp4>` or `keypoints/<sha256>.jsonl`.
class ObjectKey {
public:
    /// Throws E_BAD_KEY for anything that is not a well-formed key.
    static ObjectKey parse(std::string_view text);

    const std::string& str() const { return text_; }
    std::string_view digest() const;
    std::string_view ext() const;
    ObjectKind kind() const { return kind_; }
    /// Last path component, e.g. `<sha256>.webm`.
    std::string_view file_name() const;

    bool operator==(const ObjectKey& other) const { return text_ == other.text_; }
    auto operator<=>(const ObjectKey& other) const { return text_ <=> other.text_; }

private:
    ObjectKey(std::string text, ObjectKind kind) : text_(std::move(text)), kind_(kind) {}
    friend ObjectKey make_object_key(const Sha256Digest&, std::string_view);

    std::string text_;
    ObjectKind kind_;
};

bool is_video_ext(std::string_view ext);

/// Throws E_BAD_EXT unless ext is `.webm`, `.mp4` or `.jsonl`.
ObjectKey make_object_key(const Sha256Digest& digest, std::string_view ext);

/// Deterministic content address of `bytes`.
ObjectKey key_for(std::string_view bytes, std::string_view ext);

/// Streaming upload. Bytes are hashed as they arrive and only become visible on
/// commit(); destroying an uncommitted writer discards everything written.
class ObjectWriter {
public:
    ObjectWriter(std::filesystem::path spool_dir, std::string ext, std::size_t max_bytes);
    virtual ~ObjectWriter();
    ObjectWriter(const ObjectWriter&) = delete;
    ObjectWriter& operator=(const ObjectWriter&) = delete;

    /// Throws E_TOO_LARGE once the running size passes the cap.
    void write(std::string_view chunk);
    ObjectKey commit();
    std::size_t size() const { return size_; }

protected:
    /// Makes the spooled file visible under `key`. Must be a no-op when it already exists.
    virtual void publish(const std::filesystem::path& spooled, const ObjectKey& key) = 0;

private:
    void discard() noexcept;

    std::filesystem::path spool_path_;
    std::ofstream out_;
    std::string ext_;
    std::size_t max_bytes_;
    std::size_t size_ = 0;
    Sha256 hash_;
    bool done_ = false;
};

class ObjectStore {
public:
    virtual ~ObjectStore() = default;

    virtual std::unique_ptr<ObjectWriter> open_writer(std::string_view ext) = 0;
    /// Throws E_NOT_FOUND.
    virtual std::string get_object(const ObjectKey& key) = 0;
    virtual bool exists(const ObjectKey& key) = 0;
    virtual std::vector<ObjectKey> list() = 0;
    virtual void copy_to_file(const ObjectKey& key, const std::filesystem::path& dest);
    virtual std::size_t max_object_bytes() const = 0;

    /// Idempotent: identical bytes always land on the same key.
    ObjectKey put_object(std::string_view bytes, std::string_view ext);
};

class LocalObjectStore final : public ObjectStore {
public:
    explicit LocalObjectStore(std::filesystem::path root, std::size_t max_bytes = kDefaultMaxObjectBytes);

    std::unique_ptr<ObjectWriter> open_writer(std::string_view ext) override;
    std::string get_object(const ObjectKey& key) override;
    bool exists(const ObjectKey& key) override;
    std::vector<ObjectKey> list() override;
    void copy_to_file(const ObjectKey& key, const std::filesystem::path& dest) override;
    std::size_t max_object_bytes() const override { return max_bytes_; }

    std::filesystem::path path_of(const ObjectKey& key) const { return root_ / key.str(); }
    const std::filesystem::path& root() const { return root_; }

private:
    std::filesystem::path root_;
    std::size_t max_bytes_;
};

}  // namespace signcrowd
