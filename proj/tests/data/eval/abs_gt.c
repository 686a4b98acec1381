/*@ ensures \result >= 0;
    ensures x >= 0 ==> \result == x;
    ensures \result == x || \result == -x; */
int iabs(int x)
{
  if (x < 0)
    return -x;
  return x;
}
