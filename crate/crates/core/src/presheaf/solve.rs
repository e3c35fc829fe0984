/// Backtracking enumeration of assignments `value[v] < domain[v]` subject to
/// functional constraints `value[a] = table[value[b]]`.
pub(crate) struct Functional {
    domains: Vec<usize>,
    /// For each variable `b`: `(a, table)` with `value[a] = table[value[b]]`.
    forward: Vec<Vec<(usize, usize)>>,
    tables: Vec<Vec<usize>>,
}

impl Functional {
    pub(crate) fn new(domains: Vec<usize>) -> Self {
        let n = domains.len();
        Functional { domains, forward: vec![Vec::new(); n], tables: Vec::new() }
    }

    /// Require `value[a] = table[value[b]]`.
    pub(crate) fn constrain(&mut self, b: usize, a: usize, table: Vec<usize>) {
        let id = match self.tables.iter().position(|t| *t == table) {
            Some(i) => i,
            None => {
                self.tables.push(table);
                self.tables.len() - 1
            }
        };
        self.forward[b].push((a, id));
    }

    fn propagate(&self, v: usize, assign: &mut [Option<usize>], trail: &mut Vec<usize>) -> bool {
        let mut stack = vec![v];
        while let Some(b) = stack.pop() {
            let val = assign[b].expect("assigned");
            for &(a, t) in &self.forward[b] {
                let forced = self.tables[t][val];
                match assign[a] {
                    Some(x) if x != forced => return false,
                    Some(_) => {}
                    None => {
                        if forced >= self.domains[a] {
                            return false;
                        }
                        assign[a] = Some(forced);
                        trail.push(a);
                        stack.push(a);
                    }
                }
            }
        }
        true
    }

    /// All solutions, in lexicographic order of the variable values; `None`
    /// if there are more than `limit`.
    pub(crate) fn solutions(&self, limit: usize) -> Option<Vec<Vec<usize>>> {
        let mut assign = vec![None; self.domains.len()];
        let mut out = Vec::new();
        if self.search(0, &mut assign, limit, &mut out) {
            Some(out)
        } else {
            None
        }
    }

    fn search(&self, i: usize, assign: &mut Vec<Option<usize>>, limit: usize, out: &mut Vec<Vec<usize>>) -> bool {
        if i == self.domains.len() {
            if out.len() == limit {
                return false;
            }
            out.push(assign.iter().map(|x| x.expect("complete")).collect());
            return true;
        }
        if assign[i].is_some() {
            return self.search(i + 1, assign, limit, out);
        }
        for val in 0..self.domains[i] {
            assign[i] = Some(val);
            let mut trail = vec![i];
            let ok = self.propagate(i, assign, &mut trail);
            let within = !ok || self.search(i + 1, assign, limit, out);
            for v in trail {
                assign[v] = None;
            }
            if !within {
                return false;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_pairs() {
        let mut f = Functional::new(vec![3, 3]);
        f.constrain(0, 1, vec![0, 1, 2]);
        assert_eq!(f.solutions(10).unwrap(), vec![vec![0, 0], vec![1, 1], vec![2, 2]]);
    }

    #[test]
    fn contradiction_and_limit() {
        let mut f = Functional::new(vec![2, 2]);
        f.constrain(0, 1, vec![0, 1]);
        f.constrain(0, 1, vec![1, 0]);
        assert!(f.solutions(10).unwrap().is_empty());
        let free = Functional::new(vec![2, 2, 2]);
        assert!(free.solutions(7).is_none());
        assert_eq!(free.solutions(8).unwrap().len(), 8);
    }
}
