parameter = {
    "log_level": "WARNING",
    "cli": {
        "default_profile": "toy",
        "default_ledger": "conjsig.ledger",
        "default_format": "binary",
    },
    "profile": {
        "toy": {
            "action": [[2, 1], [1, 1]],
            "sample_bound": 8,
            "shift_bound": 8,
            "hash": {
                "exponent_bound": 2**32,
                "shift_bound": 8,
                "domain_tag": b"conjsig/v1",
            },
            # 2^2 * 3 * 5 = 60
            "factorization": {2: 2, 3: 1, 5: 1},
            "policy": {
                "min_nj": 2,
                "excluded_primes": [],
                "max_exponent_in_nj": {},
                "max_uses": None,
            },
            "centralizer_samples": 256,
            "setup_retries": 32,
        },
        "desk": {
            "action": [[2, 1], [1, 1]],
            "sample_bound": 2**64,
            "shift_bound": 1,
            "hash": {
                "exponent_bound": 2**64,
                "shift_bound": 1,
                "domain_tag": b"conjsig/v1",
            },
            # 2^5 * 3^3 * 5 * 7 * 11 * 13 = 4,324,320
            "factorization": {2: 5, 3: 3, 5: 1, 7: 1, 11: 1, 13: 1},
            "policy": {
                "min_nj": 2,
                "excluded_primes": [],
                "max_exponent_in_nj": {},
                "max_uses": 256,
            },
            "centralizer_samples": 64,
            "setup_retries": 32,
        },
        "demo": {
            "action": [[2, 1], [1, 1]],
            "sample_bound": 2**256,
            "shift_bound": 1,
            "hash": {
                "exponent_bound": 2**256,
                "shift_bound": 1,
                "domain_tag": b"conjsig/v1",
            },
            "factorization": {2: 5, 3: 3, 5: 1, 7: 1, 11: 1, 13: 1},
            "policy": {
                "min_nj": 2,
                "excluded_primes": [],
                "max_exponent_in_nj": {},
                "max_uses": 256,
            },
            "centralizer_samples": 64,
            "setup_retries": 32,
        },
    },
}
