//! Bit-exact simulation of descriptor placement and XOR codeword delivery.
//!
//! Every file is split into `C(K, t)` descriptors, one per `t`-subset of users;
//! `subset` ids are lexicographic ranks of those subsets (see
//! [`crate::subsets::rank`]). A user caches every descriptor whose subset
//! contains it. A codeword for group `S` serving its top `j` users XORs, for
//! each served user `u`, the descriptor of `u`'s demanded file indexed by
//! `S \ {u}`. Every other term is cached at `u`, so `u` can strip them.

use std::collections::BTreeMap;

use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::model::MulticastGroup;
use crate::subsets;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Descriptor {
    pub file: usize,
    pub subset: usize,
    pub payload: Vec<u8>,
}

/// All descriptors of all files, keyed by `(file, subset)`.
#[derive(Debug, Clone)]
pub struct Library {
    users: usize,
    gain: usize,
    files: usize,
    payload_len: usize,
    descriptors: BTreeMap<(usize, usize), Vec<u8>>,
}

impl Library {
    /// A complete library of uniformly random payloads.
    pub fn random<R: Rng + ?Sized>(
        files: usize,
        users: usize,
        gain: usize,
        payload_len: usize,
        rng: &mut R,
    ) -> Result<Self> {
        check_dims(users, gain)?;
        let per_file = subsets::binomial(users, gain) as usize;
        let mut descriptors = BTreeMap::new();
        for file in 0..files {
            for subset in 0..per_file {
                let mut payload = vec![0u8; payload_len];
                rng.fill_bytes(&mut payload);
                descriptors.insert((file, subset), payload);
            }
        }
        Ok(Self {
            users,
            gain,
            files,
            payload_len,
            descriptors,
        })
    }

    /// Assembles a library from explicit descriptors. Completeness is not
    /// required here; [`place_caches`] rejects incomplete libraries.
    pub fn from_descriptors(
        files: usize,
        users: usize,
        gain: usize,
        descriptors: impl IntoIterator<Item = Descriptor>,
    ) -> Result<Self> {
        check_dims(users, gain)?;
        let per_file = subsets::binomial(users, gain) as usize;
        let mut map = BTreeMap::new();
        let mut payload_len = None;
        for d in descriptors {
            if d.file >= files || d.subset >= per_file {
                return Err(invalid(format!(
                    "descriptor (file {}, subset {}) out of range",
                    d.file, d.subset
                )));
            }
            if *payload_len.get_or_insert(d.payload.len()) != d.payload.len() {
                return Err(invalid("descriptor payloads differ in length"));
            }
            if map.insert((d.file, d.subset), d.payload).is_some() {
                return Err(invalid(format!(
                    "duplicate descriptor (file {}, subset {})",
                    d.file, d.subset
                )));
            }
        }
        Ok(Self {
            users,
            gain,
            files,
            payload_len: payload_len.unwrap_or(0),
            descriptors: map,
        })
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn gain(&self) -> usize {
        self.gain
    }

    pub fn files(&self) -> usize {
        self.files
    }

    pub fn payload_len(&self) -> usize {
        self.payload_len
    }

    pub fn get(&self, file: usize, subset: usize) -> Option<&[u8]> {
        self.descriptors.get(&(file, subset)).map(Vec::as_slice)
    }

    pub fn descriptor(&self, file: usize, subset: usize) -> Result<Descriptor> {
        self.get(file, subset)
            .map(|p| Descriptor {
                file,
                subset,
                payload: p.to_vec(),
            })
            .ok_or(Error::MissingDescriptor { file, subset })
    }

    /// Subset id of `group \ {user}`.
    pub fn subset_without(&self, group: &[usize], user: usize) -> usize {
        let rest: Vec<usize> = group.iter().copied().filter(|&u| u != user).collect();
        subsets::rank(&rest, self.users) as usize
    }
}

fn check_dims(users: usize, gain: usize) -> Result<()> {
    if users == 0 || gain > users {
        return Err(invalid(format!("need K >= 1 and 0 <= t <= K, got K={users}, t={gain}")));
    }
    Ok(())
}

/// Distinct files when the library is large enough, otherwise round-robin.
pub fn default_demands(users: usize, files: usize) -> Vec<usize> {
    (0..users).map(|u| u % files.max(1)).collect()
}

/// One user's cache: every descriptor whose subset contains the user.
#[derive(Debug, Clone)]
pub struct CacheContents {
    pub user: usize,
    pub stored: BTreeMap<(usize, usize), Vec<u8>>,
}

impl CacheContents {
    pub fn len(&self) -> usize {
        self.stored.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stored.is_empty()
    }

    pub fn get(&self, file: usize, subset: usize) -> Option<&[u8]> {
        self.stored.get(&(file, subset)).map(Vec::as_slice)
    }
}

/// Fills all `K` caches; fails if any descriptor is absent from `library`.
pub fn place_caches(library: &Library) -> Result<Vec<CacheContents>> {
    let (users, gain) = (library.users, library.gain);
    let mut caches: Vec<CacheContents> = (0..users)
        .map(|user| CacheContents {
            user,
            stored: BTreeMap::new(),
        })
        .collect();
    for file in 0..library.files {
        for (subset, members) in subsets::subsets(users, gain).enumerate() {
            let payload = library
                .get(file, subset)
                .ok_or(Error::MissingDescriptor { file, subset })?;
            for &u in &members {
                caches[u].stored.insert((file, subset), payload.to_vec());
            }
        }
    }
    Ok(caches)
}

/// A transmitted codeword: the XOR of the descriptors demanded by the top
/// `served` users of `group`, sent at `rate`.
#[derive(Debug, Clone)]
pub struct Codeword {
    pub group: MulticastGroup,
    pub served: usize,
    pub payload: Vec<u8>,
    pub rate: f64,
    /// Network size `K`, needed to index subsets.
    pub users: usize,
}

fn xor_into(acc: &mut [u8], other: &[u8]) {
    for (a, b) in acc.iter_mut().zip(other) {
        *a ^= b;
    }
}

pub fn build_codeword(group: &MulticastGroup, served: usize, demands: &[usize], library: &Library) -> Result<Codeword> {
    if served == 0 || served > group.max_level() {
        return Err(invalid(format!(
            "served prefix must be in 1..={}, got {served}",
            group.max_level()
        )));
    }
    let mut payload = vec![0u8; library.payload_len];
    for &u in &group.order()[..served] {
        let file = *demands
            .get(u)
            .ok_or_else(|| invalid(format!("no demand for user {}", u + 1)))?;
        let subset = library.subset_without(group.members(), u);
        let term = library
            .get(file, subset)
            .ok_or(Error::MissingDescriptor { file, subset })?;
        xor_into(&mut payload, term);
    }
    Ok(Codeword {
        group: group.clone(),
        served,
        payload,
        rate: group.rate(served),
        users: library.users,
    })
}

/// Recovers `user`'s demanded descriptor from `codeword` using its cache.
pub fn decode(user: usize, codeword: &Codeword, cache: &CacheContents, demands: &[usize]) -> Result<Descriptor> {
    let group = &codeword.group;
    let served = &group.order()[..codeword.served];
    if !served.contains(&user) {
        return Err(Error::NotARecipient { user });
    }
    let subset_without = |v: usize| {
        let rest: Vec<usize> = group.members().iter().copied().filter(|&u| u != v).collect();
        subsets::rank(&rest, codeword.users) as usize
    };
    let mut payload = codeword.payload.clone();
    for &other in served.iter().filter(|&&v| v != user) {
        let file = demands[other];
        let subset = subset_without(other);
        let term = cache
            .get(file, subset)
            .ok_or(Error::PlacementViolation { user, file, subset })?;
        xor_into(&mut payload, term);
    }
    Ok(Descriptor {
        file: demands[user],
        subset: subset_without(user),
        payload,
    })
}
