//! Authorization. Every mutating handler needs a [`Grant`], and only
//! [`authorize`] can produce one.

use crate::domain::{DomainError, GroupId, ResourceId, Store, TransferMode, UserId};

use super::error::ApiError;
use super::session::SessionToken;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Action {
    CreateGroup,
    /// Edit a group, manage its subgroups, or add resources to it.
    MutateGroup(GroupId),
    /// Edit, delete, annotate, tag or archive a resource.
    MutateResource(ResourceId),
    ChangeMembership(GroupId),
    Transfer {
        resource: ResourceId,
        target: GroupId,
        mode: TransferMode,
    },
    /// Build a new group from existing ones (merge, copy).
    Derive(Vec<GroupId>),
}

#[derive(Debug)]
pub struct Grant {
    actor: UserId,
    action: Action,
}

impl Grant {
    pub fn actor(&self) -> UserId {
        self.actor
    }

    pub fn action(&self) -> &Action {
        &self.action
    }
}

/// Read-only groups refuse every mutation, for every role. Non-members may
/// not mutate; admins bypass membership only.
pub fn authorize(store: &Store, session: &SessionToken, action: Action) -> Result<Grant, ApiError> {
    let actor = session.user;
    match &action {
        Action::CreateGroup => {}
        Action::MutateGroup(g) => store.check_can_mutate(actor, *g)?,
        Action::MutateResource(r) => {
            let res = store.resource(*r)?;
            store.check_can_mutate(actor, res.subgroup_id.unwrap_or(res.group_id))?;
        }
        Action::ChangeMembership(g) => {
            if store.group(*g)?.read_only {
                return Err(DomainError::ReadOnlyGroup(*g).into());
            }
        }
        Action::Transfer {
            resource,
            target,
            mode,
        } => {
            let res = store.resource(*resource)?;
            store.group(*target)?;
            if *mode == TransferMode::Move {
                store.check_can_mutate(actor, res.group_id)?;
            }
            store.check_can_mutate(actor, *target)?;
        }
        Action::Derive(sources) => {
            for g in sources {
                if !store.can_read_group(Some(actor), *g)? {
                    return Err(DomainError::NotAMember {
                        user: actor,
                        group: *g,
                    }
                    .into());
                }
            }
        }
    }
    Ok(Grant { actor, action })
}
