using System;
using System.Data;
using Shop.Business.Models;

namespace Shop.Data.Repositories
{
    public class CustomerRepository
    {
        public Customer Load(int id)
        {
            DataTable table = DbHelper.Query("usp_LoadCustomer", id);
            return new Customer((string)table.Rows[0]["Name"], (string)table.Rows[0]["Email"]);
        }

        public Customer FindByEmail(string email)
        {
            DataTable table = DbHelper.Query("usp_CustomerByEmail", email);
            return table.Rows.Count == 0 ? null : Load((int)table.Rows[0]["Id"]);
        }

        public string GetEmail(int customerId)
        {
            return Load(customerId).Email;
        }

        public void Insert(Customer customer)
        {
            DbHelper.Execute("usp_InsertCustomer", customer.Id);
        }

        public void Touch(int customerId)
        {
            DbHelper.Execute("usp_TouchCustomer", customerId);
        }
    }
}
