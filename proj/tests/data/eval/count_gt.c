/*@ requires n >= 0;
    ensures \result == n; */
int count_up(int n)
{
  int i = 0;
  /*@ loop invariant 0 <= i;
      loop invariant i <= n; */
  while (i < n)
    i++;
  return i;
}
