use sntrup_core::keypool::{pool_size_from_env, POOL_SIZE_ENV};
use sntrup_core::{Error, KeyPool, SNTRUP761};

// One test per binary: it mutates the process environment.
#[test]
fn pool_size_from_environment() {
    std::env::remove_var(POOL_SIZE_ENV);
    assert_eq!(pool_size_from_env().unwrap(), 32);
    assert_eq!(KeyPool::new(SNTRUP761).unwrap().capacity(), 32);

    std::env::set_var(POOL_SIZE_ENV, "8");
    let pool = KeyPool::new(SNTRUP761).unwrap();
    assert_eq!(pool.capacity(), 8);
    assert_eq!(pool.stats().capacity, 8);

    for bad in ["0", "-1", "lots", ""] {
        std::env::set_var(POOL_SIZE_ENV, bad);
        assert!(matches!(KeyPool::new(SNTRUP761), Err(Error::InvalidPoolSize(_))));
    }
    std::env::remove_var(POOL_SIZE_ENV);
}
