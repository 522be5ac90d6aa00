//! Synthetic blog stores for the benchmarks.

use evolve_core::{EntityKey, MemoryState, PropertyMap};

/// `users` authors, each with `posts_per_user` blog posts.
pub fn blog_store(users: usize, posts_per_user: usize) -> MemoryState {
    let mut ms = MemoryState::new();
    for u in 0..users {
        let name = format!("author{u}");
        ms.insert(
            EntityKey::new("user", u as i64),
            PropertyMap::new()
                .with("name", name.as_str())
                .with("email", format!("{name}@example.org"))
                .with("url", format!("http://example.org/{u}"))
                .with("version", 1i64),
        );
        for p in 0..posts_per_user {
            let id = (u * posts_per_user + p) as i64;
            ms.insert(
                EntityKey::new("blogpost", id),
                PropertyMap::new()
                    .with("title", format!("Post {id}"))
                    .with("content", "NoSQL databases..")
                    .with("author", name.as_str())
                    .with("version", 1i64),
            );
        }
    }
    ms
}

pub const STATEMENTS: [&str; 5] = [
    "add blogpost.likes = 0 where blogpost.version = 1",
    "delete blogpost.url",
    "rename blogpost.text to content",
    "move user.url to blogpost where user.name = blogpost.author",
    "copy user.email to blogpost where user.name = blogpost.author and user.version = 1",
];
